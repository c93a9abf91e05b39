#include "lcsense/text.hpp"

#include <charconv>
#include <cmath>

namespace lcsense::text {

std::optional<double> parse_double(std::string_view token) {
    if (!token.empty() && token.front() == '+') {
        token.remove_prefix(1);
        if (!token.empty() && (token.front() == '+' || token.front() == '-')) {
            return std::nullopt;
        }
    }
    if (token.empty()) return std::nullopt;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::string format_scientific(double v, int significant_digits) {
    char buf[48];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                         std::chars_format::scientific,
                                         significant_digits - 1);
    std::string out(buf, ptr);
    for (char& c : out) {
        if (c == 'e') c = 'E';
    }
    // std::to_chars writes minimal exponent digits; pad to two as %E does.
    const auto epos = out.find('E');
    if (epos != std::string::npos && out.size() - epos == 3) {
        out.insert(epos + 2, 1, '0');
    }
    return out;
}

std::string format_general(double v, int significant_digits) {
    char buf[48];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                         std::chars_format::general, significant_digits);
    return std::string(buf, ptr);
}

}  // namespace lcsense::text
