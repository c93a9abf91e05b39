#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "lcsense/errors.hpp"
#include "lcsense/rfnet.hpp"

namespace lcsense::touchstone {

enum class FrequencyUnit { hz, khz, mhz, ghz };
enum class Parameter { s, z, y };
enum class Format { ri, ma, db };

double unit_scale(FrequencyUnit unit);
std::string unit_token(FrequencyUnit unit);
std::string parameter_token(Parameter p);
std::string format_token(Format f);

struct OptionLine {
    FrequencyUnit frequency_unit = FrequencyUnit::ghz;
    Parameter parameter = Parameter::s;
    Format format = Format::ma;
    double reference_resistance = 50.0;
};

/// In-memory image of a Touchstone v1 file. Frequencies are stored in Hz and
/// values as complex numbers regardless of the on-disk format. Two-port points
/// keep the v1 column order 11, 21, 12, 22.
struct TouchstoneDocument {
    OptionLine option_line;
    std::vector<std::string> comments;
    std::size_t ports = 1;
    std::vector<double> frequencies_hz;
    std::vector<std::complex<double>> values;  // stride = ports*ports per point

    std::size_t points() const noexcept {
        return ports == 0 ? 0 : values.size() / (ports * ports);
    }
    std::complex<double> value(std::size_t point, std::size_t column) const {
        return values[point * ports * ports + column];
    }
};

/// Parses a Touchstone v1 byte stream. Single pass; the first violation is
/// reported as FormatError with a 1-based line number. `[Version] 2.0` files
/// raise UnsupportedVersionError.
TouchstoneDocument parse(std::istream& in);
TouchstoneDocument parse(const std::string& text);
TouchstoneDocument parse_file(const std::string& path);

/// Serializes a document: comments first, normalized upper-case option line,
/// then data rows with 12-significant-digit scientific numbers and LF endings.
/// Two-port rows are never split across lines.
std::string write(const TouchstoneDocument& doc, Format format);
void write_file(const TouchstoneDocument& doc, Format format, const std::string& path);

/// Converts a 1-port document to the internal impedance domain, applying the
/// v1 reference-resistance normalization for Z and Y parameter files.
rfnet::OnePortSweep to_one_port_sweep(const TouchstoneDocument& doc);

/// Converts a 2-port document to an S-parameter sweep (Z/Y documents are
/// denormalized and converted through the Z domain).
rfnet::TwoPortSweep to_two_port_sweep(const TouchstoneDocument& doc);

/// Builds a writable S-parameter document from a sweep.
TouchstoneDocument from_one_port_sweep(const rfnet::OnePortSweep& sweep,
                                       FrequencyUnit unit = FrequencyUnit::mhz);
TouchstoneDocument from_two_port_sweep(const rfnet::TwoPortSweep& sweep,
                                       FrequencyUnit unit = FrequencyUnit::mhz);

}  // namespace lcsense::touchstone
