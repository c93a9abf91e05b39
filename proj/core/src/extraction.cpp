#include "lcsense/extraction.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace lcsense::extraction {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void CapacitorModel::validate() const {
    if (!(capacitance > 0.0) || !std::isfinite(capacitance)) {
        throw DomainError("capacitance must be finite and > 0");
    }
    if (esr < 0.0 || !std::isfinite(esr)) {
        throw DomainError("esr must be finite and >= 0");
    }
    if (parasitic_inductance < 0.0 || !std::isfinite(parasitic_inductance)) {
        throw DomainError("parasitic inductance must be finite and >= 0");
    }
    if (area && !(*area > 0.0)) {
        throw DomainError("area must be > 0 when present");
    }
}

std::complex<double> CapacitorModel::impedance_at(double f_hz) const {
    if (!(f_hz > 0.0)) {
        throw DomainError("frequency must be > 0");
    }
    const double w = kTwoPi * f_hz;
    return {esr, w * parasitic_inductance - 1.0 / (w * capacitance)};
}

std::optional<double> CapacitorModel::analytic_srf() const {
    if (parasitic_inductance <= 0.0) return std::nullopt;
    return 1.0 / (kTwoPi * std::sqrt(parasitic_inductance * capacitance));
}

rfnet::OnePortSweep CapacitorModel::synthesize(rfnet::FrequencyGrid grid,
                                               double reference_impedance) const {
    validate();
    std::vector<std::complex<double>> z(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        z[i] = impedance_at(grid[i]);
    }
    return rfnet::OnePortSweep::from_impedance(std::move(grid), std::move(z),
                                               reference_impedance);
}

double capacitance_from_impedance(std::complex<double> z, double f_hz) {
    if (!(f_hz > 0.0) || !std::isfinite(f_hz)) {
        throw DomainError("frequency must be finite and > 0");
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("impedance must be finite");
    }
    if (z.imag() >= 0.0) {
        throw AboveResonanceError("Im{Z} >= 0: device is inductive here, capacitance undefined");
    }
    return -1.0 / (z.imag() * kTwoPi * f_hz);
}

double quality_factor(std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw DomainError("impedance must be finite");
    }
    if (z.real() == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return std::abs(z.imag()) / std::abs(z.real());
}

std::optional<double> self_resonant_frequency(const rfnet::OnePortSweep& sweep) {
    const auto& f = sweep.grid().points();
    const auto& z = sweep.impedance();
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double a = z[i].imag();
        const double b = z[i + 1].imag();
        if (a < 0.0 && b >= 0.0) {
            if (b == 0.0) return f[i + 1];
            return f[i] + (0.0 - a) * (f[i + 1] - f[i]) / (b - a);
        }
    }
    return std::nullopt;
}

ExtractionReport extract(const rfnet::OnePortSweep& sweep, Band band,
                         std::optional<double> area) {
    const auto& f = sweep.grid().points();
    if (!(band.f_lo < band.f_hi)) {
        throw DomainError("band requires f_lo < f_hi");
    }
    if (band.f_lo < f.front() || band.f_hi > f.back()) {
        throw DomainError("band [" + std::to_string(band.f_lo) + ", " +
                          std::to_string(band.f_hi) + "] not within grid bounds");
    }
    if (area && !(*area > 0.0)) {
        throw DomainError("area must be > 0");
    }

    ExtractionReport report;
    report.band = band;
    report.c_of_f.resize(f.size());
    report.q_of_f.resize(f.size());

    const auto& z = sweep.impedance();
    std::vector<double> band_c;
    double sum_q = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        report.q_of_f[i] = quality_factor(z[i]);
        const bool capacitive = z[i].imag() < 0.0;
        if (capacitive) {
            report.c_of_f[i] = capacitance_from_impedance(z[i], f[i]);
        }
        if (capacitive && f[i] >= band.f_lo && f[i] <= band.f_hi) {
            band_c.push_back(*report.c_of_f[i]);
            sum_q += report.q_of_f[i];
        }
    }
    if (band_c.empty()) {
        throw NoCapacitiveRegionError("no grid point with Im{Z} < 0 inside the band");
    }

    const double n = static_cast<double>(band_c.size());
    double sum_c = 0.0;
    for (double c : band_c) sum_c += c;
    report.band_mean_c = sum_c / n;
    double ss = 0.0;
    for (double c : band_c) {
        const double d = c - report.band_mean_c;
        ss += d * d;
    }
    report.band_std_c = std::sqrt(ss / n);
    report.band_mean_q = sum_q / n;
    report.srf = self_resonant_frequency(sweep);
    if (area) {
        report.band_mean_c_per_area = report.band_mean_c / *area;
        report.band_std_c_per_area = report.band_std_c / *area;
    }
    return report;
}

}  // namespace lcsense::extraction
