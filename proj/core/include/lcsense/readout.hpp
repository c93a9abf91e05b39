#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lcsense/errors.hpp"

namespace lcsense::readout {

/// A reflection dip: parabolic-refined frequency, |S11| in dB at the refined
/// minimum, and the dip's prominence over the surrounding trace.
struct ResonancePeak {
    double frequency = 0.0;  // Hz
    double depth_db = 0.0;
    double prominence_db = 0.0;
};

/// Local minima of a dB trace with prominence >= `prominence_db`, refined by
/// 3-point parabolic interpolation (never moved past the neighbouring grid
/// points) and sorted by frequency. Endpoints are never reported.
std::vector<ResonancePeak> find_dips(std::span<const double> frequency_hz,
                                     std::span<const double> trace_db,
                                     double prominence_db);

enum class TrackPolicy { nearest, highest_frequency };

enum class MonotoneDirection { increasing, decreasing };

struct CalibrationSample {
    double temperature_c = 0.0;
    double frequency_hz = 0.0;
};

/// Monotone map between temperature and tracked resonant frequency.
/// Validated at construction: >= 3 samples, strictly increasing temperatures,
/// strictly monotone frequencies.
class CalibrationCurve {
public:
    static CalibrationCurve from_samples(std::vector<CalibrationSample> samples);

    const std::vector<CalibrationSample>& samples() const noexcept { return samples_; }
    MonotoneDirection direction() const noexcept { return direction_; }

private:
    CalibrationCurve(std::vector<CalibrationSample> samples, MonotoneDirection direction)
        : samples_(std::move(samples)), direction_(direction) {}

    std::vector<CalibrationSample> samples_;
    MonotoneDirection direction_;
};

/// Per-temperature peak selection. `nearest` follows the peak closest to the
/// previously selected frequency, seeded by the first temperature's peak
/// nearest `reference_frequency` (required for this policy); equidistant peaks
/// resolve to the lower frequency. `highest_frequency` always takes the top
/// dip. Every temperature needs at least one peak.
std::vector<ResonancePeak> select_peaks(
    const std::vector<std::pair<double, std::vector<ResonancePeak>>>& peaks_by_temperature,
    TrackPolicy policy, std::optional<double> reference_frequency = {});

/// select_peaks + strict monotonicity validation; a non-monotone sequence
/// raises TrackingError with the offending temperature index.
CalibrationCurve track(
    const std::vector<std::pair<double, std::vector<ResonancePeak>>>& peaks_by_temperature,
    TrackPolicy policy, std::optional<double> reference_frequency = {});

struct SensitivityReport {
    double t_lo = 0.0;    // degC
    double t_hi = 0.0;    // degC
    double delta_f = 0.0; // Hz, signed f(t_hi) - f(t_lo)
    double avg_sensitivity_pct_per_degc = 0.0;   // 100*|delta_f|/f(t_lo)/(t_hi-t_lo)
    double slope_mhz_per_degc = 0.0;             // |delta_f|/(t_hi-t_lo), in MHz
    double freq_normalized_pct_per_degc = 0.0;   // 100*slope/reference_frequency
    double reference_frequency = 0.0;            // Hz, f(t_lo)
};

SensitivityReport sensitivity(const CalibrationCurve& curve);

enum class InvertMode { clamp, strict };

/// Temperature for a measured resonant frequency, via shape-preserving
/// monotone piecewise-cubic interpolation of T as a function of f_r.
/// `clamp` saturates at the calibrated endpoints, `strict` raises RangeError.
double invert(const CalibrationCurve& curve, double f_measured_hz,
              InvertMode mode = InvertMode::clamp);

/// CSV persistence: optional single leading '#' metadata line, then a
/// `temperature_c,f_r_hz` header and data rows, LF endings.
void save_calibration_csv(const CalibrationCurve& curve, std::ostream& out,
                          const std::string& metadata = "");
void save_calibration_csv_file(const CalibrationCurve& curve, const std::string& path,
                               const std::string& metadata = "");
CalibrationCurve load_calibration_csv(std::istream& in);
CalibrationCurve load_calibration_csv_file(const std::string& path);

}  // namespace lcsense::readout
