#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "lcsense/errors.hpp"
#include "lcsense/rfnet.hpp"

namespace lcsense::extraction {

/// Series C-ESR-Lpar lumped capacitor. Z(f) = esr + j(2*pi*f*Lpar - 1/(2*pi*f*C)).
struct CapacitorModel {
    double capacitance = 0.0;           // F, > 0
    double esr = 0.0;                   // ohm, >= 0
    double parasitic_inductance = 0.0;  // H, >= 0
    std::optional<double> area;         // m^2, > 0 when present

    void validate() const;
    std::complex<double> impedance_at(double f_hz) const;

    /// 1/(2*pi*sqrt(Lpar*C)); absent for an ideal capacitor (Lpar = 0).
    std::optional<double> analytic_srf() const;

    rfnet::OnePortSweep synthesize(rfnet::FrequencyGrid grid,
                                   double reference_impedance = rfnet::kDefaultReferenceImpedance) const;
};

struct Band {
    double f_lo = 0.0;  // Hz
    double f_hi = 0.0;  // Hz
};

/// Per-point and band-aggregated capacitor properties of a one-port sweep.
/// c_of_f entries are absent where Im{Z} >= 0 (above self-resonance).
struct ExtractionReport {
    std::vector<std::optional<double>> c_of_f;  // F
    std::vector<double> q_of_f;                 // +inf where Re{Z} = 0
    std::optional<double> srf;                  // Hz
    double band_mean_c = 0.0;                   // F
    double band_std_c = 0.0;                    // F
    double band_mean_q = 0.0;
    Band band;
    std::optional<double> band_mean_c_per_area;  // F/m^2, set when an area was given
    std::optional<double> band_std_c_per_area;   // F/m^2
};

/// C = -1 / (Im{Z} * 2*pi*f), valid only where Im{Z} < 0.
double capacitance_from_impedance(std::complex<double> z, double f_hz);

/// Q = |Im{Z}| / |Re{Z}|; returns +inf when Re{Z} = 0 (lossless point).
/// The loss tangent is 1/Q.
double quality_factor(std::complex<double> z);

/// Lowest frequency where Im{Z} crosses from negative to positive, linearly
/// interpolated between the bracketing grid points. Absent without a crossing.
std::optional<double> self_resonant_frequency(const rfnet::OnePortSweep& sweep);

/// Per-point capacitance/Q plus unweighted mean/std statistics over band grid
/// points with Im{Z} < 0. Throws NoCapacitiveRegionError when the band holds
/// no such point.
ExtractionReport extract(const rfnet::OnePortSweep& sweep, Band band,
                         std::optional<double> area = {});

}  // namespace lcsense::extraction
