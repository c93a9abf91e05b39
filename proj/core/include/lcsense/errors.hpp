#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lcsense {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid numeric input or violated precondition (non-finite value, wrong sign, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A Z<->S conversion hit a singular point (s = 1 open circuit, Z + z0*I not invertible).
class SingularConversionError : public Error {
public:
    explicit SingularConversionError(const std::string& what,
                                     std::size_t point_index = kNoPoint)
        : Error(what), point_index_(point_index) {}

    /// Grid index of the offending point, or kNoPoint for scalar conversions.
    std::size_t point_index() const noexcept { return point_index_; }

    static constexpr std::size_t kNoPoint = static_cast<std::size_t>(-1);

private:
    std::size_t point_index_;
};

/// Malformed text input (Touchstone, CSV, config). Carries a 1-based line number
/// when one is known; 0 means the error is not tied to a specific line.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what, std::size_t line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Touchstone v2 and later are not handled.
class UnsupportedVersionError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Evaluation outside a declared validity range with extrapolation disabled,
/// or strict-mode inversion outside the calibrated span.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Least-squares fit could not produce a model (too few points, no convergence).
class FitError : public Error {
public:
    using Error::Error;
};

/// Peak tracking produced a non-monotone frequency sequence.
class TrackingError : public Error {
public:
    explicit TrackingError(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}

    /// Index of the first offending temperature sample.
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Capacitance requested where Im{Z} >= 0 (device is inductive there).
class AboveResonanceError : public DomainError {
public:
    using DomainError::DomainError;
};

/// No grid point in the requested band has Im{Z} < 0.
class NoCapacitiveRegionError : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace lcsense
