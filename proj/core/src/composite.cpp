#include "lcsense/composite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace lcsense::composite {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kTauLo = 1.0;    // degC, search bounds for the profiled fit
constexpr double kTauHi = 500.0;

void check_range(const CompositeResponseModel& m, double t, bool extrapolate) {
    if (!std::isfinite(t)) {
        throw DomainError("temperature must be finite");
    }
    if (!extrapolate && (t < m.t_min || t > m.t_max)) {
        throw RangeError("temperature " + std::to_string(t) + " outside validity range [" +
                         std::to_string(m.t_min) + ", " + std::to_string(m.t_max) + "]");
    }
}

struct LinearLs {
    double intercept;
    double slope;
    double sse;
};

// Ordinary least squares of y against (1, x).
LinearLs linear_least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double det = n * sxx - sx * sx;
    if (det == 0.0) {
        throw FitError("degenerate abscissa in linear fit");
    }
    LinearLs out{};
    out.intercept = (sy * sxx - sx * sxy) / det;
    out.slope = (n * sxy - sx * sy) / det;
    out.sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (out.intercept + out.slope * x[i]);
        out.sse += r * r;
    }
    return out;
}

// For fixed tau, solve min ||a + b*exp(-dt/tau) - y||^2 in (a, b).
LinearLs profiled_exp_ls(const std::vector<double>& dt, const std::vector<double>& y,
                         double tau) {
    std::vector<double> u(dt.size());
    for (std::size_t i = 0; i < dt.size(); ++i) {
        u[i] = std::exp(-dt[i] / tau);
    }
    return linear_least_squares(u, y);
}

}  // namespace

void CompositeResponseModel::validate() const {
    if (!(c_ref > 0.0) || !std::isfinite(c_ref)) {
        throw DomainError("c_ref must be finite and > 0");
    }
    if (!std::isfinite(t_ref) || !std::isfinite(t_min) || !std::isfinite(t_max) ||
        !(t_min < t_max)) {
        throw DomainError("validity range requires finite t_min < t_max");
    }
    if (kind == ResponseKind::linear) {
        if (!std::isfinite(slope_rel)) {
            throw DomainError("slope_rel must be finite");
        }
        // Linear in T: positivity at the endpoints covers the whole range.
        if (capacitance_at(t_min, true) <= 0.0 || capacitance_at(t_max, true) <= 0.0) {
            throw DomainError("linear model capacitance not > 0 over the validity range");
        }
    } else {
        if (!(rr_max > 0.0) || !(rr_max < 1.0)) {
            throw DomainError("rr_max must be in (0, 1)");
        }
        if (!(tau > 0.0) || !std::isfinite(tau)) {
            throw DomainError("tau must be finite and > 0");
        }
    }
    if (tand_ref < 0.0 || !std::isfinite(tand_ref) || !std::isfinite(tand_slope_rel)) {
        throw DomainError("tand_ref must be finite and >= 0, tand_slope_rel finite");
    }
    if (tan_delta_at(t_min, true) < 0.0 || tan_delta_at(t_max, true) < 0.0) {
        throw DomainError("tan delta not >= 0 over the validity range");
    }
    if (frequency_tag && !(*frequency_tag > 0.0)) {
        throw DomainError("frequency tag must be > 0 when present");
    }
}

double CompositeResponseModel::capacitance_at(double t, bool extrapolate) const {
    check_range(*this, t, extrapolate);
    if (kind == ResponseKind::linear) {
        return c_ref * (1.0 + slope_rel * (t - t_ref));
    }
    return c_ref * (1.0 - rr_max * (1.0 - std::exp(-(t - t_ref) / tau)));
}

double CompositeResponseModel::tan_delta_at(double t, bool extrapolate) const {
    check_range(*this, t, extrapolate);
    return tand_ref * (1.0 + tand_slope_rel * (t - t_ref));
}

double CompositeResponseModel::esr_at(double t, double f_hz, bool extrapolate) const {
    if (!(f_hz > 0.0)) {
        throw DomainError("frequency must be > 0");
    }
    return tan_delta_at(t, extrapolate) / (kTwoPi * f_hz * capacitance_at(t, extrapolate));
}

Evaluation evaluate(const CompositeResponseModel& model, double t, bool extrapolate) {
    return {model.capacitance_at(t, extrapolate), model.tan_delta_at(t, extrapolate)};
}

RelativeResponse relative_response(double value_at_t, double value_at_ref) {
    if (!std::isfinite(value_at_t) || !std::isfinite(value_at_ref)) {
        throw DomainError("relative response requires finite values");
    }
    if (value_at_ref == 0.0) {
        throw DomainError("relative response undefined for a zero reference value");
    }
    const double delta = value_at_t - value_at_ref;
    const int sign = delta > 0.0 ? 1 : delta < 0.0 ? -1 : 0;
    return {std::abs(delta) / std::abs(value_at_ref), sign};
}

void TemperatureSeries::validate() const {
    if (points.size() < 3) {
        throw DomainError("temperature series needs at least 3 points, got " +
                          std::to_string(points.size()));
    }
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& [t, v] : points) {
        if (!std::isfinite(t) || !std::isfinite(v)) {
            throw DomainError("temperature series values must be finite");
        }
        if (t <= prev) {
            throw DomainError("temperatures must be strictly increasing");
        }
        prev = t;
    }
}

FitResult fit(const TemperatureSeries& data, FitKind kind) {
    data.validate();
    for (const auto& [t, v] : data.points) {
        if (v <= 0.0) {
            throw FitError("fit requires positive values");
        }
    }

    const double t_ref = data.points.front().first;
    std::vector<double> dt(data.points.size()), y(data.points.size());
    for (std::size_t i = 0; i < data.points.size(); ++i) {
        dt[i] = data.points[i].first - t_ref;
        y[i] = data.points[i].second;
    }
    const double n = static_cast<double>(y.size());

    auto fit_linear = [&]() -> FitResult {
        const LinearLs ls = linear_least_squares(dt, y);
        if (ls.intercept <= 0.0) {
            throw FitError("linear fit produced a nonpositive reference capacitance");
        }
        CompositeResponseModel m;
        m.kind = ResponseKind::linear;
        m.c_ref = ls.intercept;
        m.t_ref = t_ref;
        m.slope_rel = ls.slope / ls.intercept;
        m.t_min = data.points.front().first;
        m.t_max = data.points.back().first;
        return {m, std::sqrt(ls.sse / n), y.size()};
    };

    auto fit_exp = [&]() -> FitResult {
        if (y.size() < 4) {
            throw FitError("exp_decay fit needs at least 4 points, got " +
                           std::to_string(y.size()));
        }
        // Coarse log-spaced scan, then golden-section refinement of the bracket.
        constexpr int kScan = 128;
        const double log_lo = std::log(kTauLo), log_hi = std::log(kTauHi);
        double best_tau = kTauLo;
        double best_sse = std::numeric_limits<double>::infinity();
        int best_i = 0;
        std::vector<double> taus(kScan);
        for (int i = 0; i < kScan; ++i) {
            taus[i] = std::exp(log_lo + (log_hi - log_lo) * i / (kScan - 1));
            const double sse = profiled_exp_ls(dt, y, taus[i]).sse;
            if (sse < best_sse) {
                best_sse = sse;
                best_tau = taus[i];
                best_i = i;
            }
        }
        double a = taus[std::max(0, best_i - 1)];
        double b = taus[std::min(kScan - 1, best_i + 1)];
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - invphi * (b - a);
        double x2 = a + invphi * (b - a);
        double f1 = profiled_exp_ls(dt, y, x1).sse;
        double f2 = profiled_exp_ls(dt, y, x2).sse;
        for (int it = 0; it < 200 && (b - a) > 1e-10 * (1.0 + a); ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - invphi * (b - a);
                f1 = profiled_exp_ls(dt, y, x1).sse;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + invphi * (b - a);
                f2 = profiled_exp_ls(dt, y, x2).sse;
            }
        }
        best_tau = 0.5 * (a + b);
        const LinearLs ls = profiled_exp_ls(dt, y, best_tau);
        // y = A + B exp(-dt/tau) with A = c_ref (1 - rr_max), B = c_ref rr_max.
        const double c_ref = ls.intercept + ls.slope;
        const double rr_max = c_ref != 0.0 ? ls.slope / c_ref : 0.0;
        if (!(c_ref > 0.0) || !(rr_max > 0.0) || !(rr_max < 1.0)) {
            std::ostringstream diag;
            diag << "exp_decay fit left the model space: c_ref=" << c_ref
                 << " rr_max=" << rr_max << " tau=" << best_tau << " rmse="
                 << std::sqrt(ls.sse / n);
            throw FitError(diag.str());
        }
        CompositeResponseModel m;
        m.kind = ResponseKind::exp_decay;
        m.c_ref = c_ref;
        m.t_ref = t_ref;
        m.rr_max = rr_max;
        m.tau = best_tau;
        m.t_min = data.points.front().first;
        m.t_max = data.points.back().first;
        return {m, std::sqrt(ls.sse / n), y.size()};
    };

    switch (kind) {
        case FitKind::linear:
            return fit_linear();
        case FitKind::exp_decay:
            return fit_exp();
        case FitKind::auto_select: {
            const FitResult lin = fit_linear();
            if (y.size() < 4) return lin;
            FitResult exp_fit;
            try {
                exp_fit = fit_exp();
            } catch (const FitError&) {
                return lin;
            }
            return exp_fit.rmse < lin.rmse ? exp_fit : lin;  // tie goes to linear
        }
    }
    throw FitError("unreachable fit kind");
}

std::string model_to_json(const CompositeResponseModel& model) {
    model.validate();
    nlohmann::ordered_json j;
    j["kind"] = model.kind == ResponseKind::linear ? "linear" : "exp_decay";
    j["c_ref_f"] = model.c_ref;
    j["t_ref_c"] = model.t_ref;
    if (model.kind == ResponseKind::linear) {
        j["slope_rel_per_degc"] = model.slope_rel;
    } else {
        j["rr_max"] = model.rr_max;
        j["tau_degc"] = model.tau;
    }
    j["tand_ref"] = model.tand_ref;
    j["tand_slope_rel_per_degc"] = model.tand_slope_rel;
    j["valid_t_min_c"] = model.t_min;
    j["valid_t_max_c"] = model.t_max;
    if (model.frequency_tag) {
        j["frequency_tag_hz"] = *model.frequency_tag;
    }
    return j.dump(2) + "\n";
}

CompositeResponseModel model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("model file is not valid JSON: ") + e.what());
    }
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key)) {
            throw FormatError(std::string("model file missing key '") + key + "'");
        }
        return j.at(key);
    };
    auto num = [&](const char* key) -> double {
        const auto& v = need(key);
        if (!v.is_number()) {
            throw FormatError(std::string("model key '") + key + "' must be a number");
        }
        return v.get<double>();
    };

    CompositeResponseModel m;
    const std::string kind = need("kind").get<std::string>();
    if (kind == "linear") {
        m.kind = ResponseKind::linear;
        m.slope_rel = num("slope_rel_per_degc");
    } else if (kind == "exp_decay") {
        m.kind = ResponseKind::exp_decay;
        m.rr_max = num("rr_max");
        m.tau = num("tau_degc");
    } else {
        throw FormatError("model kind must be 'linear' or 'exp_decay', got '" + kind + "'");
    }
    m.c_ref = num("c_ref_f");
    m.t_ref = num("t_ref_c");
    if (j.contains("tand_ref")) m.tand_ref = num("tand_ref");
    if (j.contains("tand_slope_rel_per_degc")) m.tand_slope_rel = num("tand_slope_rel_per_degc");
    if (j.contains("valid_t_min_c")) m.t_min = num("valid_t_min_c");
    if (j.contains("valid_t_max_c")) m.t_max = num("valid_t_max_c");
    if (j.contains("frequency_tag_hz")) m.frequency_tag = num("frequency_tag_hz");
    m.validate();
    return m;
}

CompositeResponseModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

void save_model_file(const CompositeResponseModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out << model_to_json(model);
}

}  // namespace lcsense::composite
