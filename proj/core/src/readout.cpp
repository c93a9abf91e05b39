#include "lcsense/readout.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "lcsense/text.hpp"

namespace lcsense::readout {

namespace {

std::string format_g9(double v) {
    return text::format_general(v, 9);
}

/// Vertex of the parabola through three points, in Newton form. Returns the
/// grid point unchanged when the parabola is degenerate or opens downward.
ResonancePeak refine_parabolic(double x0, double y0, double x1, double y1, double x2,
                               double y2, double prominence) {
    const double d1 = (y1 - y0) / (x1 - x0);
    const double d2 = (y2 - y1) / (x2 - x1);
    const double c2 = (d2 - d1) / (x2 - x0);
    if (!(c2 > 0.0)) {
        return {x1, y1, prominence};
    }
    double xv = 0.5 * (x0 + x1) - d1 / (2.0 * c2);
    xv = std::clamp(xv, x0, x2);
    const double yv = y1 + d1 * (xv - x1) + c2 * (xv - x1) * (xv - x0);
    return {xv, yv, prominence};
}

/// Prominence of the dip at `p`: walk outward until a strictly lower sample
/// (or the trace edge), take the highest sample seen on each side, and use the
/// lower of the two cols.
double dip_prominence(std::span<const double> y, std::size_t p) {
    const double v = y[p];
    double left_col = v;
    for (std::size_t i = p; i-- > 0;) {
        if (y[i] < v) break;
        left_col = std::max(left_col, y[i]);
    }
    double right_col = v;
    for (std::size_t i = p + 1; i < y.size(); ++i) {
        if (y[i] < v) break;
        right_col = std::max(right_col, y[i]);
    }
    return std::min(left_col, right_col) - v;
}

struct MonotoneCheck {
    MonotoneDirection direction = MonotoneDirection::increasing;
    std::optional<std::size_t> offending_index;
};

MonotoneCheck check_strictly_monotone(const std::vector<CalibrationSample>& samples) {
    MonotoneCheck out;
    if (samples[1].frequency_hz > samples[0].frequency_hz) {
        out.direction = MonotoneDirection::increasing;
    } else if (samples[1].frequency_hz < samples[0].frequency_hz) {
        out.direction = MonotoneDirection::decreasing;
    } else {
        out.offending_index = 1;
        return out;
    }
    for (std::size_t i = 2; i < samples.size(); ++i) {
        const double prev = samples[i - 1].frequency_hz;
        const double cur = samples[i].frequency_hz;
        const bool ok = out.direction == MonotoneDirection::increasing ? cur > prev : cur < prev;
        if (!ok) {
            out.offending_index = i;
            return out;
        }
    }
    return out;
}

/// Shape-preserving piecewise-cubic interpolant (Fritsch-Butland interior
/// slopes, clamped 3-point endpoint slopes). x must be strictly increasing.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)), m_(x_.size()) {
        const std::size_t n = x_.size();
        std::vector<double> h(n - 1), d(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            h[k] = x_[k + 1] - x_[k];
            d[k] = (y_[k + 1] - y_[k]) / h[k];
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (d[k - 1] * d[k] <= 0.0) {
                m_[k] = 0.0;
            } else {
                const double w1 = 2.0 * h[k] + h[k - 1];
                const double w2 = h[k] + 2.0 * h[k - 1];
                m_[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
            }
        }
        m_[0] = edge_slope(h[0], h.size() > 1 ? h[1] : h[0], d[0], d.size() > 1 ? d[1] : d[0]);
        m_[n - 1] = edge_slope(h[n - 2], n > 2 ? h[n - 3] : h[n - 2], d[n - 2],
                               n > 2 ? d[n - 3] : d[n - 2]);
    }

    double operator()(double x) const {
        std::size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (x_[mid] > x ? hi : lo) = mid;
        }
        const double h = x_[lo + 1] - x_[lo];
        const double t = (x - x_[lo]) / h;
        const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        const double h10 = t * (1.0 - t) * (1.0 - t);
        const double h01 = t * t * (3.0 - 2.0 * t);
        const double h11 = t * t * (t - 1.0);
        return h00 * y_[lo] + h * h10 * m_[lo] + h01 * y_[lo + 1] + h * h11 * m_[lo + 1];
    }

private:
    static double edge_slope(double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) {
            m = 0.0;
        } else if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) {
            m = 3.0 * d0;
        }
        return m;
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace

std::vector<ResonancePeak> find_dips(std::span<const double> frequency_hz,
                                     std::span<const double> trace_db, double prominence_db) {
    if (frequency_hz.size() != trace_db.size()) {
        throw DomainError("trace length does not match frequency grid");
    }
    if (frequency_hz.size() < 5) {
        throw DomainError("dip detection needs at least 5 grid points");
    }
    if (!(prominence_db > 0.0)) {
        throw DomainError("prominence threshold must be > 0");
    }
    for (double v : trace_db) {
        if (!std::isfinite(v)) {
            throw DomainError("trace contains a non-finite value");
        }
    }

    const std::size_t n = trace_db.size();
    std::vector<ResonancePeak> dips;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(trace_db[i] < trace_db[i - 1])) {
            ++i;
            continue;
        }
        // Extend across a flat run; the dip index is the run's left-middle.
        std::size_t j = i;
        while (j + 1 < n && trace_db[j + 1] == trace_db[i]) ++j;
        if (j + 1 >= n || !(trace_db[j + 1] > trace_db[i])) {
            i = j + 1;
            continue;
        }
        const std::size_t p = (i + j) / 2;
        const double prom = dip_prominence(trace_db, p);
        if (prom >= prominence_db) {
            dips.push_back(refine_parabolic(frequency_hz[p - 1], trace_db[p - 1],
                                            frequency_hz[p], trace_db[p],
                                            frequency_hz[p + 1], trace_db[p + 1], prom));
        }
        i = j + 1;
    }
    return dips;
}

std::vector<ResonancePeak> select_peaks(
    const std::vector<std::pair<double, std::vector<ResonancePeak>>>& peaks_by_temperature,
    TrackPolicy policy, std::optional<double> reference_frequency) {
    if (peaks_by_temperature.empty()) {
        throw DomainError("no temperatures to track");
    }
    double prev_t = -std::numeric_limits<double>::infinity();
    for (const auto& [t, peaks] : peaks_by_temperature) {
        if (t <= prev_t) {
            throw DomainError("temperatures must be strictly increasing for tracking");
        }
        prev_t = t;
        if (peaks.empty()) {
            throw DomainError("every temperature needs at least one peak, none at " +
                              std::to_string(t) + " degC");
        }
    }
    if (policy == TrackPolicy::nearest && !reference_frequency) {
        throw DomainError("nearest-policy tracking needs a reference frequency seed");
    }

    auto nearest_to = [](const std::vector<ResonancePeak>& peaks, double target) {
        const ResonancePeak* best = &peaks.front();
        double best_dist = std::abs(peaks.front().frequency - target);
        for (const ResonancePeak& p : peaks) {
            const double dist = std::abs(p.frequency - target);
            // Equidistant peaks resolve to the lower frequency.
            if (dist < best_dist ||
                (dist == best_dist && p.frequency < best->frequency)) {
                best = &p;
                best_dist = dist;
            }
        }
        return *best;
    };
    auto highest = [](const std::vector<ResonancePeak>& peaks) {
        const ResonancePeak* best = &peaks.front();
        for (const ResonancePeak& p : peaks) {
            if (p.frequency > best->frequency) best = &p;
        }
        return *best;
    };

    std::vector<ResonancePeak> selected;
    selected.reserve(peaks_by_temperature.size());
    double cursor = reference_frequency.value_or(0.0);
    for (const auto& [t, peaks] : peaks_by_temperature) {
        const ResonancePeak pick =
            policy == TrackPolicy::highest_frequency ? highest(peaks) : nearest_to(peaks, cursor);
        cursor = pick.frequency;
        selected.push_back(pick);
    }
    return selected;
}

CalibrationCurve track(
    const std::vector<std::pair<double, std::vector<ResonancePeak>>>& peaks_by_temperature,
    TrackPolicy policy, std::optional<double> reference_frequency) {
    const std::vector<ResonancePeak> picks =
        select_peaks(peaks_by_temperature, policy, reference_frequency);
    if (picks.size() < 3) {
        throw DomainError("tracking needs at least 3 temperatures, got " +
                          std::to_string(picks.size()));
    }
    std::vector<CalibrationSample> samples(picks.size());
    for (std::size_t i = 0; i < picks.size(); ++i) {
        samples[i] = {peaks_by_temperature[i].first, picks[i].frequency};
    }
    const MonotoneCheck check = check_strictly_monotone(samples);
    if (check.offending_index) {
        throw TrackingError("tracked frequency sequence is not strictly monotone at "
                            "temperature index " + std::to_string(*check.offending_index),
                            *check.offending_index);
    }
    return CalibrationCurve::from_samples(std::move(samples));
}

CalibrationCurve CalibrationCurve::from_samples(std::vector<CalibrationSample> samples) {
    if (samples.size() < 3) {
        throw DomainError("calibration curve needs at least 3 samples, got " +
                          std::to_string(samples.size()));
    }
    double prev_t = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        if (!std::isfinite(s.temperature_c) || !std::isfinite(s.frequency_hz) ||
            !(s.frequency_hz > 0.0)) {
            throw DomainError("calibration samples must be finite with positive frequency");
        }
        if (s.temperature_c <= prev_t) {
            throw DomainError("calibration temperatures must be strictly increasing");
        }
        prev_t = s.temperature_c;
    }
    const MonotoneCheck check = check_strictly_monotone(samples);
    if (check.offending_index) {
        throw DomainError("calibration frequencies must be strictly monotone (violated at "
                          "sample " + std::to_string(*check.offending_index) + ")");
    }
    return CalibrationCurve(std::move(samples), check.direction);
}

SensitivityReport sensitivity(const CalibrationCurve& curve) {
    const auto& s = curve.samples();
    SensitivityReport report;
    report.t_lo = s.front().temperature_c;
    report.t_hi = s.back().temperature_c;
    const double span = report.t_hi - report.t_lo;
    if (!(span > 0.0)) {
        throw DomainError("degenerate temperature span");
    }
    report.reference_frequency = s.front().frequency_hz;
    report.delta_f = s.back().frequency_hz - s.front().frequency_hz;
    report.avg_sensitivity_pct_per_degc =
        100.0 * std::abs(report.delta_f) / report.reference_frequency / span;
    report.slope_mhz_per_degc = std::abs(report.delta_f) / span / 1e6;
    report.freq_normalized_pct_per_degc =
        100.0 * (std::abs(report.delta_f) / span) / report.reference_frequency;
    return report;
}

double invert(const CalibrationCurve& curve, double f_measured_hz, InvertMode mode) {
    if (!std::isfinite(f_measured_hz)) {
        throw DomainError("measured frequency must be finite");
    }
    const auto& s = curve.samples();
    std::vector<double> x(s.size()), y(s.size());
    if (curve.direction() == MonotoneDirection::increasing) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            x[i] = s[i].frequency_hz;
            y[i] = s[i].temperature_c;
        }
    } else {
        for (std::size_t i = 0; i < s.size(); ++i) {
            x[i] = s[s.size() - 1 - i].frequency_hz;
            y[i] = s[s.size() - 1 - i].temperature_c;
        }
    }
    if (f_measured_hz < x.front() || f_measured_hz > x.back()) {
        if (mode == InvertMode::strict) {
            throw RangeError("frequency " + std::to_string(f_measured_hz) +
                             " outside the calibrated range [" + std::to_string(x.front()) +
                             ", " + std::to_string(x.back()) + "]");
        }
        return f_measured_hz < x.front() ? y.front() : y.back();
    }
    return MonotoneCubic(std::move(x), std::move(y))(f_measured_hz);
}

void save_calibration_csv(const CalibrationCurve& curve, std::ostream& out,
                          const std::string& metadata) {
    if (!metadata.empty()) {
        out << "# " << metadata << "\n";
    }
    out << "temperature_c,f_r_hz\n";
    for (const auto& s : curve.samples()) {
        out << format_g9(s.temperature_c) << "," << format_g9(s.frequency_hz) << "\n";
    }
}

void save_calibration_csv_file(const CalibrationCurve& curve, const std::string& path,
                               const std::string& metadata) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    save_calibration_csv(curve, out, metadata);
}

CalibrationCurve load_calibration_csv(std::istream& in) {
    std::vector<CalibrationSample> samples;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (header_seen || line_no > 1) {
                throw FormatError("only a single leading '#' metadata line is allowed",
                                  line_no);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "temperature_c,f_r_hz") {
                throw FormatError("expected header 'temperature_c,f_r_hz'", line_no);
            }
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw FormatError("expected 'temperature,frequency' row", line_no);
        }
        const std::string t_str = line.substr(0, comma);
        const std::string f_str = line.substr(comma + 1);
        const auto t = text::parse_double(t_str);
        if (!t) {
            throw FormatError("invalid temperature '" + t_str + "'", line_no);
        }
        const auto f = text::parse_double(f_str);
        if (!f) {
            throw FormatError("invalid frequency '" + f_str + "'", line_no);
        }
        samples.push_back({*t, *f});
    }
    if (!header_seen) {
        throw FormatError("missing 'temperature_c,f_r_hz' header");
    }
    return CalibrationCurve::from_samples(std::move(samples));
}

CalibrationCurve load_calibration_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    return load_calibration_csv(in);
}

}  // namespace lcsense::readout
