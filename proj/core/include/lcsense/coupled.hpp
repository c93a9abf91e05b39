#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "lcsense/composite.hpp"
#include "lcsense/errors.hpp"
#include "lcsense/rfnet.hpp"

namespace lcsense::coupled {

struct CoilParams {
    double inductance = 0.0;        // H, > 0
    double resistance = 0.0;        // ohm, >= 0
    double self_capacitance = 0.0;  // F, parallel parasitic across the coil branch

    void validate() const;
};

/// Sensor-side series capacitor: either a fixed value in F or a temperature
/// model (which then requires a temperature at simulation time).
using SensorCapacitor = std::variant<double, composite::CompositeResponseModel>;

/// Two series-RLC loops linked by mutual inductance M = k*sqrt(Lr*Ls), both
/// ports terminated in port_impedance.
struct CoupledSystem {
    CoilParams reader;
    double reader_tuning_capacitance = 0.0;  // F, series
    CoilParams sensor;
    SensorCapacitor sensor_capacitance = 0.0;
    double k = 0.0;  // coupling coefficient in [0, 1)
    double port_impedance = rfnet::kDefaultReferenceImpedance;

    void validate() const;
    double mutual_inductance() const;
    /// Sensor series capacitance, evaluating the model when one is attached.
    double sensor_capacitance_at(std::optional<double> t) const;
};

/// f = 1 / (2*pi*sqrt(l*c)).
double resonant_frequency(double l, double c);

/// c = 1 / ((2*pi*f_target)^2 * l); exact inverse of resonant_frequency.
double solve_tuning_capacitor(double l, double f_target);

/// Mesh-equation solve over the grid:
///   Z11 = reader coil branch + 1/(j*w*Cr)
///   Z22 = sensor coil branch + 1/(j*w*Cs(T)) + tand(T)/(w*Cs(T))
///   Z12 = Z21 = j*w*M
/// with a coil branch of (R + j*w*L) shunted by its self-capacitance when
/// nonzero, converted to S at the port impedance. Singular points are recorded
/// in failed_points (NaN matrices) and the sweep continues.
rfnet::TwoPortSweep sweep(const CoupledSystem& system, rfnet::FrequencyGrid grid,
                          std::optional<double> t = {});

enum class CouplingRegime { under, critical, over };

struct CouplingReport {
    CouplingRegime regime = CouplingRegime::under;
    double k_crit = 0.0;
    double q_reader = 0.0;  // loaded Q at the loop's own resonance
    double q_sensor = 0.0;
};

/// k_crit = 1/sqrt(Q1*Q2) with loaded loop Qs (coil R + port + capacitor ESR),
/// classified against k with a +/-2% dead band for "critical" (ties critical).
CouplingReport coupling_regime(const CoupledSystem& system, std::optional<double> t = {});

/// One sweep per temperature, in input order. Requires a model-backed sensor
/// capacitor.
std::vector<std::pair<double, rfnet::TwoPortSweep>> temperature_sweep(
    const CoupledSystem& system, const rfnet::FrequencyGrid& grid,
    std::span<const double> temperatures);

}  // namespace lcsense::coupled
