#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lcsense/errors.hpp"

namespace lcsense::composite {

enum class ResponseKind { linear, exp_decay };

/// Parametric temperature law for a composite capacitor at one measurement
/// frequency. Capacitance:
///   linear:    C(T) = c_ref * (1 + slope_rel * (T - t_ref))
///   exp_decay: C(T) = c_ref * (1 - rr_max * (1 - exp(-(T - t_ref) / tau)))
/// Loss tangent: tand(T) = tand_ref * (1 + tand_slope_rel * (T - t_ref)).
/// Models at different frequency tags are independent objects; the library
/// never interpolates between them.
struct CompositeResponseModel {
    ResponseKind kind = ResponseKind::linear;
    double c_ref = 0.0;   // F at t_ref
    double t_ref = 20.0;  // degC

    double slope_rel = 0.0;  // 1/degC, linear kind
    double rr_max = 0.0;     // fraction in (0, 1), exp_decay kind
    double tau = 0.0;        // degC > 0, exp_decay kind

    double tand_ref = 0.0;
    double tand_slope_rel = 0.0;  // 1/degC

    double t_min = 20.0;   // declared validity range, degC
    double t_max = 110.0;
    std::optional<double> frequency_tag;  // Hz

    void validate() const;

    double capacitance_at(double t, bool extrapolate = false) const;
    double tan_delta_at(double t, bool extrapolate = false) const;
    /// Equivalent series resistance tand(T) / (2*pi*f*C(T)).
    double esr_at(double t, double f_hz, bool extrapolate = false) const;
};

struct Evaluation {
    double capacitance;  // F
    double tan_delta;
};

/// Closed-form model evaluation; RangeError outside the validity range unless
/// extrapolation is enabled.
Evaluation evaluate(const CompositeResponseModel& model, double t, bool extrapolate = false);

struct RelativeResponse {
    double magnitude;  // |v - v_ref| / v_ref
    int sign;          // -1, 0, +1 for the direction of the change
};

RelativeResponse relative_response(double value_at_t, double value_at_ref);

/// Measured (temperature, value) table, strictly increasing in temperature.
struct TemperatureSeries {
    std::vector<std::pair<double, double>> points;  // (degC, value)

    void validate() const;  // >= 3 points, finite, strictly increasing temperatures
};

enum class FitKind { linear, exp_decay, auto_select };

struct FitResult {
    CompositeResponseModel model;
    double rmse = 0.0;
    std::size_t n_points = 0;
};

/// Least-squares fit. t_ref is pinned to the first data temperature and the
/// validity range to the data span. exp_decay profiles (c_ref*rr_max, c_ref)
/// linearly at each tau and minimizes over tau in [1, 500] degC with a
/// deterministic golden-section search. `auto_select` picks the lower-RMSE
/// kind, ties going to linear.
FitResult fit(const TemperatureSeries& data, FitKind kind);

/// JSON document round-trip for model files (the CLI's on-disk format).
std::string model_to_json(const CompositeResponseModel& model);
CompositeResponseModel model_from_json(const std::string& text);
CompositeResponseModel load_model_file(const std::string& path);
void save_model_file(const CompositeResponseModel& model, const std::string& path);

}  // namespace lcsense::composite
