#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lcsense::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 2;   // partial per-file/per-value failures
inline constexpr int kExitUsage = 64;
inline constexpr int kExitFormat = 65;     // input-format or schema violation

struct ExtractOptions {
    std::vector<std::string> files;
    double band_lo_hz = 1e6;
    double band_hi_hz = 200e6;
    std::optional<double> area_cm2;
    std::string out_path;  // empty = stdout
};
int cmd_extract(const ExtractOptions& opts);

struct SimulateOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "s2p";  // s2p | csv
    double prominence_db = 1.0;
    std::string track_policy = "highest_frequency";  // highest_frequency | nearest
    std::optional<double> reference_frequency_hz;    // nearest-policy seed
};
int cmd_simulate(const SimulateOptions& opts);

struct FitOptions {
    std::string csv_path;
    std::string kind = "auto";  // linear | exp_decay | auto
    std::string out_model_path;
    std::optional<double> frequency_tag_hz;
};
int cmd_fit(const FitOptions& opts);

struct CalibrateOptions {
    std::string csv_path;
    std::string out_path;  // empty = stdout
    std::string metadata;
};
int cmd_calibrate(const CalibrateOptions& opts);

struct InvertOptions {
    std::string curve_path;
    std::vector<double> frequencies_hz;
    bool strict = false;
};
int cmd_invert(const InvertOptions& opts);

struct ReportOptions {
    std::string curve_path;    // sensitivity report for a calibration curve
    std::string compare_path;  // or: recompute a comparison table
    std::string out_path;
    double flag_threshold_pct = 5.0;
};
int cmd_report(const ReportOptions& opts);

}  // namespace lcsense::cli
