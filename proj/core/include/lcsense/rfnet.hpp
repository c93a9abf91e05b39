#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "lcsense/errors.hpp"

namespace lcsense::rfnet {

using Complex = std::complex<double>;

inline constexpr double kDefaultReferenceImpedance = 50.0;

/// Strictly increasing grid of frequency points in Hz. At least two points,
/// all finite and positive; validated at construction.
class FrequencyGrid {
public:
    explicit FrequencyGrid(std::vector<double> points_hz);

    /// Uniform grid with `n` points from `start_hz` to `stop_hz` inclusive.
    static FrequencyGrid linspace(double start_hz, double stop_hz, std::size_t n);

    const std::vector<double>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const noexcept { return points_[i]; }
    double front() const noexcept { return points_.front(); }
    double back() const noexcept { return points_.back(); }

private:
    std::vector<double> points_;
};

/// One-port frequency sweep. The canonical domain is impedance; reflection
/// coefficients are derived on demand against the sweep's reference impedance.
class OnePortSweep {
public:
    static OnePortSweep from_impedance(FrequencyGrid grid, std::vector<Complex> z,
                                       double reference_impedance = kDefaultReferenceImpedance);

    /// Converts the reflection data to the internal impedance domain point by
    /// point; s = 1 (open circuit) raises SingularConversionError with the index.
    static OnePortSweep from_reflection(FrequencyGrid grid, std::vector<Complex> s11,
                                        double reference_impedance = kDefaultReferenceImpedance);

    const FrequencyGrid& grid() const noexcept { return grid_; }
    const std::vector<Complex>& impedance() const noexcept { return z_; }
    double reference_impedance() const noexcept { return z0_; }

    std::vector<Complex> reflection() const;
    std::vector<double> reflection_db() const;

private:
    OnePortSweep(FrequencyGrid grid, std::vector<Complex> z, double z0);

    FrequencyGrid grid_;
    std::vector<Complex> z_;
    double z0_;
};

/// 2x2 complex matrix in port order (11, 12, 21, 22).
struct Matrix2 {
    Complex m11, m12, m21, m22;
};

/// Two-port S-parameter sweep. `failed_points` lists grid indices where a
/// Z->S conversion was singular; their matrices are NaN-filled.
struct TwoPortSweep {
    FrequencyGrid grid;
    std::vector<Matrix2> s;
    double reference_impedance = kDefaultReferenceImpedance;
    std::vector<std::size_t> failed_points;

    void validate() const;
};

/// s = (z - z0) / (z + z0). Requires finite z and z0 > 0.
Complex z_to_s_oneport(Complex z, double z0);

/// z = z0 (1 + s) / (1 - s). s = 1 is a singular conversion (open circuit).
Complex s_to_z_oneport(Complex s, double z0);

/// S = (Z - z0 I)(Z + z0 I)^-1 for a single 2x2 point.
Matrix2 z_to_s_twoport(const Matrix2& z, double z0);

/// Z = z0 (I + S)(I - S)^-1 for a single 2x2 point.
Matrix2 s_to_z_twoport(const Matrix2& s, double z0);

/// Converts a per-point Z-matrix sweep to S-parameters. A singular point
/// raises SingularConversionError carrying the grid index.
TwoPortSweep zmatrix_to_smatrix(FrequencyGrid grid, std::span<const Matrix2> z,
                                double z0 = kDefaultReferenceImpedance);

/// Singular values of a 2x2 complex matrix, descending.
std::array<double, 2> singular_values(const Matrix2& m);

/// 20*log10(|v|) with the magnitude floored at 1e-15 (-300 dB representation floor).
double magnitude_db(Complex v);

}  // namespace lcsense::rfnet
