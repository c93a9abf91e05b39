#include "lcsense/coupled.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace lcsense::coupled {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCriticalDeadBand = 0.02;

using rfnet::Complex;

/// Coil branch impedance: series R + jwL, shunted by the parasitic
/// self-capacitance when present.
Complex coil_branch(const CoilParams& coil, double w) {
    const Complex series{coil.resistance, w * coil.inductance};
    if (coil.self_capacitance <= 0.0) {
        return series;
    }
    const Complex shunt{0.0, -1.0 / (w * coil.self_capacitance)};
    return series * shunt / (series + shunt);
}

Complex nan_complex() {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
}

bool finite(Complex v) {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
}

}  // namespace

void CoilParams::validate() const {
    if (!(inductance > 0.0) || !std::isfinite(inductance)) {
        throw DomainError("coil inductance must be finite and > 0");
    }
    if (resistance < 0.0 || !std::isfinite(resistance)) {
        throw DomainError("coil resistance must be finite and >= 0");
    }
    if (self_capacitance < 0.0 || !std::isfinite(self_capacitance)) {
        throw DomainError("coil self-capacitance must be finite and >= 0");
    }
}

void CoupledSystem::validate() const {
    reader.validate();
    sensor.validate();
    if (!(reader_tuning_capacitance > 0.0)) {
        throw DomainError("reader tuning capacitance must be > 0");
    }
    if (const double* fixed = std::get_if<double>(&sensor_capacitance)) {
        if (!(*fixed > 0.0)) {
            throw DomainError("sensor capacitance must be > 0");
        }
    } else {
        std::get<composite::CompositeResponseModel>(sensor_capacitance).validate();
    }
    if (!(k >= 0.0) || !(k < 1.0)) {
        throw DomainError("coupling coefficient k must be in [0, 1)");
    }
    if (!(port_impedance > 0.0)) {
        throw DomainError("port impedance must be > 0");
    }
}

double CoupledSystem::mutual_inductance() const {
    return k * std::sqrt(reader.inductance * sensor.inductance);
}

double CoupledSystem::sensor_capacitance_at(std::optional<double> t) const {
    if (const double* fixed = std::get_if<double>(&sensor_capacitance)) {
        return *fixed;
    }
    if (!t) {
        throw DomainError("a model-backed sensor capacitor requires a temperature");
    }
    return std::get<composite::CompositeResponseModel>(sensor_capacitance).capacitance_at(*t);
}

double resonant_frequency(double l, double c) {
    if (!(l > 0.0) || !(c > 0.0) || !std::isfinite(l) || !std::isfinite(c)) {
        throw DomainError("resonant frequency requires l > 0 and c > 0");
    }
    return 1.0 / (kTwoPi * std::sqrt(l * c));
}

double solve_tuning_capacitor(double l, double f_target) {
    if (!(l > 0.0) || !(f_target > 0.0) || !std::isfinite(l) || !std::isfinite(f_target)) {
        throw DomainError("tuning capacitor solve requires l > 0 and f_target > 0");
    }
    const double w = kTwoPi * f_target;
    return 1.0 / (w * w * l);
}

rfnet::TwoPortSweep sweep(const CoupledSystem& system, rfnet::FrequencyGrid grid,
                          std::optional<double> t) {
    system.validate();
    const double cs = system.sensor_capacitance_at(t);
    const composite::CompositeResponseModel* model =
        std::get_if<composite::CompositeResponseModel>(&system.sensor_capacitance);
    const double tand = model ? model->tan_delta_at(*t) : 0.0;
    const double m = system.mutual_inductance();
    const double z0 = system.port_impedance;

    rfnet::TwoPortSweep out{std::move(grid), {}, z0, {}};
    out.s.reserve(out.grid.size());
    for (std::size_t i = 0; i < out.grid.size(); ++i) {
        const double w = kTwoPi * out.grid[i];
        const double esr = tand / (w * cs);
        const rfnet::Matrix2 z{
            coil_branch(system.reader, w) +
                Complex{0.0, -1.0 / (w * system.reader_tuning_capacitance)},
            Complex{0.0, w * m},
            Complex{0.0, w * m},
            coil_branch(system.sensor, w) + Complex{esr, -1.0 / (w * cs)},
        };
        // Non-finite entries (parallel-resonant parasitic branch, overflow at
        // extreme frequencies) are per-point failures like singular conversions.
        if (!finite(z.m11) || !finite(z.m12) || !finite(z.m22)) {
            out.s.push_back({nan_complex(), nan_complex(), nan_complex(), nan_complex()});
            out.failed_points.push_back(i);
            continue;
        }
        try {
            out.s.push_back(rfnet::z_to_s_twoport(z, z0));
        } catch (const SingularConversionError&) {
            out.s.push_back({nan_complex(), nan_complex(), nan_complex(), nan_complex()});
            out.failed_points.push_back(i);
        }
    }
    return out;
}

CouplingReport coupling_regime(const CoupledSystem& system, std::optional<double> t) {
    system.validate();
    const double cs = system.sensor_capacitance_at(t);
    const composite::CompositeResponseModel* model =
        std::get_if<composite::CompositeResponseModel>(&system.sensor_capacitance);

    const double f_reader =
        resonant_frequency(system.reader.inductance, system.reader_tuning_capacitance);
    const double f_sensor = resonant_frequency(system.sensor.inductance, cs);

    const double w_r = kTwoPi * f_reader;
    const double w_s = kTwoPi * f_sensor;
    const double esr_s = model ? model->tan_delta_at(*t) / (w_s * cs) : 0.0;

    const double r_reader = system.reader.resistance + system.port_impedance;
    const double r_sensor = system.sensor.resistance + system.port_impedance + esr_s;

    CouplingReport report;
    if (r_reader == 0.0 || r_sensor == 0.0) {
        // Infinite-Q signal: lossless loop, splitting at any nonzero coupling.
        report.q_reader = std::numeric_limits<double>::infinity();
        report.q_sensor = std::numeric_limits<double>::infinity();
        report.k_crit = 0.0;
    } else {
        report.q_reader = w_r * system.reader.inductance / r_reader;
        report.q_sensor = w_s * system.sensor.inductance / r_sensor;
        report.k_crit = 1.0 / std::sqrt(report.q_reader * report.q_sensor);
    }

    const double band = kCriticalDeadBand * report.k_crit;
    if (std::abs(system.k - report.k_crit) <= band) {
        report.regime = CouplingRegime::critical;
    } else if (system.k < report.k_crit) {
        report.regime = CouplingRegime::under;
    } else {
        report.regime = CouplingRegime::over;
    }
    return report;
}

std::vector<std::pair<double, rfnet::TwoPortSweep>> temperature_sweep(
    const CoupledSystem& system, const rfnet::FrequencyGrid& grid,
    std::span<const double> temperatures) {
    if (!std::holds_alternative<composite::CompositeResponseModel>(system.sensor_capacitance)) {
        throw DomainError("temperature sweep requires a model-backed sensor capacitor");
    }
    std::vector<std::pair<double, rfnet::TwoPortSweep>> out;
    out.reserve(temperatures.size());
    for (const double t : temperatures) {
        out.emplace_back(t, sweep(system, grid, t));
    }
    return out;
}

}  // namespace lcsense::coupled
