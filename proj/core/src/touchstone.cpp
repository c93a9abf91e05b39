#include "lcsense/touchstone.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <sstream>

#include "lcsense/text.hpp"

namespace lcsense::touchstone {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

bool parse_double(const std::string& token, double& out) {
    const auto v = text::parse_double(token);
    if (!v) return false;
    out = *v;
    return true;
}

// 12 significant digits: 9 is not enough for the 1e-9 round-trip contract
// once angles (degrees) and dB magnitudes are involved.
std::string format_number(double v) {
    return text::format_scientific(v, 12);
}

std::complex<double> decode(Format format, double a, double b) {
    switch (format) {
        case Format::ri:
            return {a, b};
        case Format::ma:
            return std::polar(a, b * kDegToRad);
        case Format::db:
            return std::polar(std::pow(10.0, a / 20.0), b * kDegToRad);
    }
    return {};
}

std::pair<double, double> encode(Format format, std::complex<double> v) {
    switch (format) {
        case Format::ri:
            return {v.real(), v.imag()};
        case Format::ma:
            return {std::abs(v), std::arg(v) / kDegToRad};
        case Format::db: {
            const double mag = std::max(std::abs(v), 1e-15);  // -300 dB floor
            return {20.0 * std::log10(mag), std::arg(v) / kDegToRad};
        }
    }
    return {};
}

OptionLine parse_option_line(const std::string& text, std::size_t line_no) {
    OptionLine opt;  // defaults: # GHZ S MA R 50
    std::istringstream ss(text);
    std::string tok;
    ss >> tok;  // leading '#', possibly glued to the first token
    if (tok.size() > 1) {
        // "#MHZ" style: push the remainder back as a token
        tok = tok.substr(1);
    } else {
        if (!(ss >> tok)) return opt;  // bare '#': all defaults
    }
    bool have_unit = false, have_param = false, have_format = false, have_r = false;
    do {
        const std::string t = upper(tok);
        if (t == "HZ" || t == "KHZ" || t == "MHZ" || t == "GHZ") {
            if (have_unit) throw FormatError("duplicate frequency unit in option line", line_no);
            have_unit = true;
            opt.frequency_unit = t == "HZ"    ? FrequencyUnit::hz
                                 : t == "KHZ" ? FrequencyUnit::khz
                                 : t == "MHZ" ? FrequencyUnit::mhz
                                              : FrequencyUnit::ghz;
        } else if (t == "S" || t == "Z" || t == "Y") {
            if (have_param) throw FormatError("duplicate parameter type in option line", line_no);
            have_param = true;
            opt.parameter = t == "S" ? Parameter::s : t == "Z" ? Parameter::z : Parameter::y;
        } else if (t == "RI" || t == "MA" || t == "DB") {
            if (have_format) throw FormatError("duplicate data format in option line", line_no);
            have_format = true;
            opt.format = t == "RI" ? Format::ri : t == "MA" ? Format::ma : Format::db;
        } else if (t == "R") {
            if (have_r) throw FormatError("duplicate reference resistance in option line", line_no);
            have_r = true;
            std::string num;
            if (!(ss >> num)) {
                throw FormatError("option line 'R' token without a resistance value", line_no);
            }
            double r = 0.0;
            if (!parse_double(num, r) || r <= 0.0) {
                throw FormatError("invalid reference resistance '" + num + "'", line_no);
            }
            opt.reference_resistance = r;
        } else {
            throw FormatError("unknown option token '" + tok + "'", line_no);
        }
    } while (ss >> tok);
    return opt;
}

struct LineScan {
    std::string content;   // line with any '!' comment stripped
    std::string comment;   // text after '!', if any
    bool has_comment = false;
};

LineScan scan_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    LineScan scan;
    const auto bang = line.find('!');
    if (bang != std::string::npos) {
        scan.has_comment = true;
        scan.comment = line.substr(bang + 1);
        line.erase(bang);
    }
    scan.content = std::move(line);
    return scan;
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

}  // namespace

double unit_scale(FrequencyUnit unit) {
    switch (unit) {
        case FrequencyUnit::hz: return 1.0;
        case FrequencyUnit::khz: return 1e3;
        case FrequencyUnit::mhz: return 1e6;
        case FrequencyUnit::ghz: return 1e9;
    }
    return 1.0;
}

std::string unit_token(FrequencyUnit unit) {
    switch (unit) {
        case FrequencyUnit::hz: return "HZ";
        case FrequencyUnit::khz: return "KHZ";
        case FrequencyUnit::mhz: return "MHZ";
        case FrequencyUnit::ghz: return "GHZ";
    }
    return "HZ";
}

std::string parameter_token(Parameter p) {
    switch (p) {
        case Parameter::s: return "S";
        case Parameter::z: return "Z";
        case Parameter::y: return "Y";
    }
    return "S";
}

std::string format_token(Format f) {
    switch (f) {
        case Format::ri: return "RI";
        case Format::ma: return "MA";
        case Format::db: return "DB";
    }
    return "RI";
}

TouchstoneDocument parse(std::istream& in) {
    TouchstoneDocument doc;
    bool have_option = false;
    bool have_data = false;
    bool ports_known = false;

    std::vector<double> row;  // accumulating logical row (2-port continuation)
    std::size_t row_start_line = 0;
    double prev_freq_hz = 0.0;

    auto flush_row = [&](std::size_t expected) {
        const double scale = unit_scale(doc.option_line.frequency_unit);
        const double f_hz = row[0] * scale;
        if (!(f_hz > 0.0) || !std::isfinite(f_hz)) {
            throw FormatError("frequency must be finite and > 0", row_start_line);
        }
        if (have_data && f_hz <= prev_freq_hz) {
            throw FormatError("non-monotone frequency", row_start_line);
        }
        prev_freq_hz = f_hz;
        have_data = true;
        doc.frequencies_hz.push_back(f_hz);
        for (std::size_t i = 1; i < expected; i += 2) {
            doc.values.push_back(decode(doc.option_line.format, row[i], row[i + 1]));
        }
        row.clear();
    };

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        LineScan scan = scan_line(std::move(raw));
        if (scan.has_comment) doc.comments.push_back(scan.comment);

        // First non-space character decides the line kind.
        std::size_t pos = scan.content.find_first_not_of(" \t");
        if (pos == std::string::npos) continue;
        const char first = scan.content[pos];

        if (first == '[') {
            throw UnsupportedVersionError(
                "Touchstone v2 keyword '" + split_tokens(scan.content.substr(pos))[0] +
                    "' is not supported (v1 only)",
                line_no);
        }
        if (first == '#') {
            if (have_option) throw FormatError("duplicate option line", line_no);
            if (have_data || !row.empty()) throw FormatError("option line after data", line_no);
            doc.option_line = parse_option_line(scan.content.substr(pos), line_no);
            have_option = true;
            continue;
        }

        // Data line: all tokens must be numbers.
        const std::vector<std::string> tokens = split_tokens(scan.content);
        std::vector<double> nums(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (!parse_double(tokens[i], nums[i])) {
                if (!have_option && !have_data) {
                    throw FormatError("expected option line or numeric data, got '" +
                                          tokens[i] + "'",
                                      line_no);
                }
                throw FormatError("invalid number '" + tokens[i] + "'", line_no);
            }
        }

        if (!ports_known) {
            // First data row decides the port count: 3 columns is a 1-port row,
            // 9 a complete 2-port row, 5 or 7 the start of a split 2-port row.
            if (nums.size() == 3) {
                doc.ports = 1;
            } else if (nums.size() == 9 || nums.size() == 5 || nums.size() == 7) {
                doc.ports = 2;
            } else {
                throw FormatError("wrong column count " + std::to_string(nums.size()) +
                                      " (expected 3 for 1-port or 9 for 2-port)",
                                  line_no);
            }
            ports_known = true;
        }

        const std::size_t expected = doc.ports == 1 ? 3 : 9;
        if (doc.ports == 1) {
            if (nums.size() != 3) {
                throw FormatError("wrong column count " + std::to_string(nums.size()) +
                                      " (expected 3)",
                                  line_no);
            }
            row = std::move(nums);
            row_start_line = line_no;
            flush_row(expected);
        } else {
            if (row.empty()) row_start_line = line_no;
            row.insert(row.end(), nums.begin(), nums.end());
            if (row.size() > expected) {
                throw FormatError("wrong column count (logical row has " +
                                      std::to_string(row.size()) + " values, expected 9)",
                                  line_no);
            }
            if (row.size() == expected) flush_row(expected);
        }
    }

    if (!row.empty()) {
        throw FormatError("incomplete data row at end of file", row_start_line);
    }
    if (!have_data) {
        throw FormatError("no data rows");
    }
    return doc;
}

TouchstoneDocument parse(const std::string& text) {
    std::istringstream ss(text);
    return parse(ss);
}

TouchstoneDocument parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    return parse(in);
}

std::string write(const TouchstoneDocument& doc, Format format) {
    std::string out;
    for (const std::string& c : doc.comments) {
        out += "!" + c + "\n";
    }
    out += "# " + unit_token(doc.option_line.frequency_unit) + " " +
           parameter_token(doc.option_line.parameter) + " " + format_token(format) + " R " +
           text::format_general(doc.option_line.reference_resistance, 6) + "\n";

    const double scale = unit_scale(doc.option_line.frequency_unit);
    const std::size_t stride = doc.ports * doc.ports;
    for (std::size_t p = 0; p < doc.points(); ++p) {
        out += format_number(doc.frequencies_hz[p] / scale);
        for (std::size_t c = 0; c < stride; ++c) {
            const auto [a, b] = encode(format, doc.value(p, c));
            out += " " + format_number(a) + " " + format_number(b);
        }
        out += "\n";
    }
    return out;
}

void write_file(const TouchstoneDocument& doc, Format format, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << write(doc, format);
}

rfnet::OnePortSweep to_one_port_sweep(const TouchstoneDocument& doc) {
    if (doc.ports != 1) {
        throw DomainError("expected a 1-port document, got " + std::to_string(doc.ports) +
                          " ports");
    }
    rfnet::FrequencyGrid grid(doc.frequencies_hz);
    const double r = doc.option_line.reference_resistance;
    std::vector<rfnet::Complex> data(doc.values.begin(), doc.values.end());
    switch (doc.option_line.parameter) {
        case Parameter::s:
            return rfnet::OnePortSweep::from_reflection(std::move(grid), std::move(data), r);
        case Parameter::z:
            for (auto& v : data) v *= r;  // v1 files store Z/R
            return rfnet::OnePortSweep::from_impedance(std::move(grid), std::move(data), r);
        case Parameter::y:
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (data[i] == rfnet::Complex{0.0, 0.0}) {
                    throw SingularConversionError("Y = 0 has no finite impedance at grid index " +
                                                      std::to_string(i),
                                                  i);
                }
                data[i] = r / data[i];  // v1 files store Y*R
            }
            return rfnet::OnePortSweep::from_impedance(std::move(grid), std::move(data), r);
    }
    throw DomainError("unreachable parameter type");
}

rfnet::TwoPortSweep to_two_port_sweep(const TouchstoneDocument& doc) {
    if (doc.ports != 2) {
        throw DomainError("expected a 2-port document, got " + std::to_string(doc.ports) +
                          " ports");
    }
    rfnet::FrequencyGrid grid(doc.frequencies_hz);
    const double r = doc.option_line.reference_resistance;
    const std::size_t n = doc.points();
    std::vector<rfnet::Matrix2> mats(n);
    for (std::size_t p = 0; p < n; ++p) {
        // disk order 11, 21, 12, 22
        mats[p] = {doc.value(p, 0), doc.value(p, 2), doc.value(p, 1), doc.value(p, 3)};
    }
    switch (doc.option_line.parameter) {
        case Parameter::s:
            return rfnet::TwoPortSweep{std::move(grid), std::move(mats), r, {}};
        case Parameter::z:
            for (auto& m : mats) {
                m.m11 *= r; m.m12 *= r; m.m21 *= r; m.m22 *= r;
            }
            return rfnet::zmatrix_to_smatrix(std::move(grid), mats, r);
        case Parameter::y: {
            for (std::size_t p = 0; p < n; ++p) {
                auto& m = mats[p];
                m.m11 /= r; m.m12 /= r; m.m21 /= r; m.m22 /= r;
                const rfnet::Complex det = m.m11 * m.m22 - m.m12 * m.m21;
                if (det == rfnet::Complex{0.0, 0.0}) {
                    throw SingularConversionError(
                        "singular Y matrix at grid index " + std::to_string(p), p);
                }
                m = {m.m22 / det, -m.m12 / det, -m.m21 / det, m.m11 / det};
            }
            return rfnet::zmatrix_to_smatrix(std::move(grid), mats, r);
        }
    }
    throw DomainError("unreachable parameter type");
}

TouchstoneDocument from_one_port_sweep(const rfnet::OnePortSweep& sweep, FrequencyUnit unit) {
    TouchstoneDocument doc;
    doc.option_line = {unit, Parameter::s, Format::ri, sweep.reference_impedance()};
    doc.ports = 1;
    doc.frequencies_hz = sweep.grid().points();
    const auto s = sweep.reflection();
    doc.values.assign(s.begin(), s.end());
    return doc;
}

TouchstoneDocument from_two_port_sweep(const rfnet::TwoPortSweep& sweep, FrequencyUnit unit) {
    if (!sweep.failed_points.empty()) {
        throw DomainError("sweep has " + std::to_string(sweep.failed_points.size()) +
                          " failed conversion points and cannot be serialized");
    }
    TouchstoneDocument doc;
    doc.option_line = {unit, Parameter::s, Format::ri, sweep.reference_impedance};
    doc.ports = 2;
    doc.frequencies_hz = sweep.grid.points();
    doc.values.reserve(sweep.s.size() * 4);
    for (const auto& m : sweep.s) {
        doc.values.push_back(m.m11);
        doc.values.push_back(m.m21);
        doc.values.push_back(m.m12);
        doc.values.push_back(m.m22);
    }
    return doc;
}

}  // namespace lcsense::touchstone
