#include "lcsense/rfnet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lcsense::rfnet {

namespace {

bool finite(Complex v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

void require_positive_z0(double z0) {
    if (!(z0 > 0.0) || !std::isfinite(z0)) {
        throw DomainError("reference impedance must be finite and > 0, got " +
                          std::to_string(z0));
    }
}

}  // namespace

FrequencyGrid::FrequencyGrid(std::vector<double> points_hz) : points_(std::move(points_hz)) {
    if (points_.size() < 2) {
        throw DomainError("frequency grid needs at least 2 points, got " +
                          std::to_string(points_.size()));
    }
    double prev = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const double f = points_[i];
        if (!std::isfinite(f) || f <= 0.0) {
            throw DomainError("frequency grid point " + std::to_string(i) +
                              " must be finite and > 0");
        }
        if (f <= prev) {
            throw DomainError("frequency grid must be strictly increasing at index " +
                              std::to_string(i));
        }
        prev = f;
    }
}

FrequencyGrid FrequencyGrid::linspace(double start_hz, double stop_hz, std::size_t n) {
    if (n < 2) {
        throw DomainError("linspace grid needs at least 2 points");
    }
    std::vector<double> pts(n);
    const double step = (stop_hz - start_hz) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = start_hz + step * static_cast<double>(i);
    }
    pts.back() = stop_hz;
    return FrequencyGrid(std::move(pts));
}

OnePortSweep::OnePortSweep(FrequencyGrid grid, std::vector<Complex> z, double z0)
    : grid_(std::move(grid)), z_(std::move(z)), z0_(z0) {
    require_positive_z0(z0_);
    if (z_.size() != grid_.size()) {
        throw DomainError("sweep data length " + std::to_string(z_.size()) +
                          " does not match grid length " + std::to_string(grid_.size()));
    }
}

OnePortSweep OnePortSweep::from_impedance(FrequencyGrid grid, std::vector<Complex> z,
                                          double reference_impedance) {
    return OnePortSweep(std::move(grid), std::move(z), reference_impedance);
}

OnePortSweep OnePortSweep::from_reflection(FrequencyGrid grid, std::vector<Complex> s11,
                                           double reference_impedance) {
    require_positive_z0(reference_impedance);
    std::vector<Complex> z(s11.size());
    for (std::size_t i = 0; i < s11.size(); ++i) {
        try {
            z[i] = s_to_z_oneport(s11[i], reference_impedance);
        } catch (const SingularConversionError& e) {
            throw SingularConversionError(std::string(e.what()) + " at grid index " +
                                              std::to_string(i),
                                          i);
        }
    }
    return OnePortSweep(std::move(grid), std::move(z), reference_impedance);
}

std::vector<Complex> OnePortSweep::reflection() const {
    std::vector<Complex> s(z_.size());
    for (std::size_t i = 0; i < z_.size(); ++i) {
        s[i] = z_to_s_oneport(z_[i], z0_);
    }
    return s;
}

std::vector<double> OnePortSweep::reflection_db() const {
    std::vector<double> db(z_.size());
    for (std::size_t i = 0; i < z_.size(); ++i) {
        db[i] = magnitude_db(z_to_s_oneport(z_[i], z0_));
    }
    return db;
}

void TwoPortSweep::validate() const {
    if (s.size() != grid.size()) {
        throw DomainError("two-port sweep data length does not match grid length");
    }
    require_positive_z0(reference_impedance);
}

Complex z_to_s_oneport(Complex z, double z0) {
    require_positive_z0(z0);
    if (!finite(z)) {
        throw DomainError("impedance must be finite for S conversion");
    }
    return (z - z0) / (z + z0);
}

Complex s_to_z_oneport(Complex s, double z0) {
    require_positive_z0(z0);
    if (!finite(s)) {
        throw DomainError("reflection coefficient must be finite for Z conversion");
    }
    if (s == Complex{1.0, 0.0}) {
        throw SingularConversionError("s = 1 (open circuit) has no finite impedance");
    }
    return z0 * (1.0 + s) / (1.0 - s);
}

Matrix2 z_to_s_twoport(const Matrix2& z, double z0) {
    require_positive_z0(z0);
    if (!finite(z.m11) || !finite(z.m12) || !finite(z.m21) || !finite(z.m22)) {
        throw DomainError("Z-matrix entries must be finite for S conversion");
    }
    // (Z + z0 I)^-1 via the 2x2 adjugate.
    const Complex a = z.m11 + z0;
    const Complex d = z.m22 + z0;
    const Complex det = a * d - z.m12 * z.m21;
    if (det == Complex{0.0, 0.0}) {
        throw SingularConversionError("Z + z0*I is singular");
    }
    const Complex i11 = d / det;
    const Complex i12 = -z.m12 / det;
    const Complex i21 = -z.m21 / det;
    const Complex i22 = a / det;
    const Complex n11 = z.m11 - z0;
    const Complex n22 = z.m22 - z0;
    return {
        n11 * i11 + z.m12 * i21,
        n11 * i12 + z.m12 * i22,
        z.m21 * i11 + n22 * i21,
        z.m21 * i12 + n22 * i22,
    };
}

Matrix2 s_to_z_twoport(const Matrix2& s, double z0) {
    require_positive_z0(z0);
    const Complex a = 1.0 - s.m11;
    const Complex d = 1.0 - s.m22;
    const Complex det = a * d - s.m12 * s.m21;
    if (det == Complex{0.0, 0.0}) {
        throw SingularConversionError("I - S is singular");
    }
    const Complex i11 = d / det;
    const Complex i12 = s.m12 / det;
    const Complex i21 = s.m21 / det;
    const Complex i22 = a / det;
    const Complex p11 = 1.0 + s.m11;
    const Complex p22 = 1.0 + s.m22;
    return {
        z0 * (p11 * i11 + s.m12 * i21),
        z0 * (p11 * i12 + s.m12 * i22),
        z0 * (s.m21 * i11 + p22 * i21),
        z0 * (s.m21 * i12 + p22 * i22),
    };
}

TwoPortSweep zmatrix_to_smatrix(FrequencyGrid grid, std::span<const Matrix2> z, double z0) {
    if (z.size() != grid.size()) {
        throw DomainError("Z-matrix sweep length does not match grid length");
    }
    TwoPortSweep out{std::move(grid), {}, z0, {}};
    out.s.reserve(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        try {
            out.s.push_back(z_to_s_twoport(z[i], z0));
        } catch (const SingularConversionError& e) {
            throw SingularConversionError(std::string(e.what()) + " at grid index " +
                                              std::to_string(i),
                                          i);
        }
    }
    return out;
}

std::array<double, 2> singular_values(const Matrix2& m) {
    // Eigenvalues of the 2x2 Hermitian matrix M^H M, closed form.
    const double a = std::norm(m.m11) + std::norm(m.m21);
    const double d = std::norm(m.m12) + std::norm(m.m22);
    const Complex b = std::conj(m.m11) * m.m12 + std::conj(m.m21) * m.m22;
    const double tr = a + d;
    const double gap = std::sqrt(std::max(0.0, (a - d) * (a - d) + 4.0 * std::norm(b)));
    const double hi = 0.5 * (tr + gap);
    const double lo = std::max(0.0, 0.5 * (tr - gap));
    return {std::sqrt(hi), std::sqrt(lo)};
}

double magnitude_db(Complex v) {
    const double mag = std::max(std::abs(v), 1e-15);
    return 20.0 * std::log10(mag);
}

}  // namespace lcsense::rfnet
