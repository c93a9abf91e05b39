#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace lcsense::text {

/// Locale-independent full-token parse; rejects trailing garbage and
/// non-finite values. Accepts an optional leading '+'.
std::optional<double> parse_double(std::string_view token);

/// Locale-independent scientific formatting with an upper-case E marker,
/// e.g. format_scientific(1.5, 12) == "1.50000000000E+00".
std::string format_scientific(double v, int significant_digits);

/// Locale-independent printf-%g-style formatting.
std::string format_general(double v, int significant_digits);

}  // namespace lcsense::text
