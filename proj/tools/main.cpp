#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "commands.hpp"
#include "lcsense/errors.hpp"
#include "lcsense/text.hpp"

namespace {

std::pair<double, double> parse_band(const std::string& band) {
    const auto colon = band.find(':');
    if (colon == std::string::npos) {
        throw CLI::ValidationError("--band", "expected f_lo:f_hi in Hz");
    }
    const auto lo = lcsense::text::parse_double(band.substr(0, colon));
    const auto hi = lcsense::text::parse_double(band.substr(colon + 1));
    if (!lo || !hi) {
        throw CLI::ValidationError("--band", "invalid band '" + band + "'");
    }
    if (!(*lo > 0.0) || !(*lo < *hi)) {
        throw CLI::ValidationError("--band", "requires 0 < f_lo < f_hi");
    }
    return {*lo, *hi};
}

}  // namespace

int main(int argc, char** argv) {
    using namespace lcsense::cli;

    CLI::App app{"Chipless wireless LC temperature sensor analysis toolkit"};
    app.require_subcommand(1);

    ExtractOptions extract_opts;
    std::string band_text;
    auto* extract = app.add_subcommand(
        "extract", "Extract capacitance, Q, and SRF from one-port Touchstone sweeps");
    extract->add_option("files", extract_opts.files, ".s1p input files")
        ->required()
        ->expected(-1);
    extract->add_option("--band", band_text,
                        "averaging band f_lo:f_hi in Hz (default 1e6:200e6)");
    extract->add_option("--area", extract_opts.area_cm2, "capacitor area in cm^2");
    extract->add_option("--out", extract_opts.out_path, "output CSV path (default stdout)");

    SimulateOptions sim_opts;
    auto* simulate = app.add_subcommand(
        "simulate", "Sweep a coupled reader/sensor system over temperature");
    simulate->add_option("config", sim_opts.config_path, "system configuration file")
        ->required();
    simulate->add_option("--out-dir", sim_opts.out_dir, "output directory (default .)");
    simulate->add_option("--format", sim_opts.format, "sweep file format (default s2p)")
        ->check(CLI::IsMember({"s2p", "csv"}));
    simulate->add_option("--prominence-db", sim_opts.prominence_db,
                         "dip prominence threshold in dB (default 1.0)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--track", sim_opts.track_policy,
                         "dip tracking policy (default highest_frequency)")
        ->check(CLI::IsMember({"highest_frequency", "nearest"}));
    simulate->add_option("--ref-freq", sim_opts.reference_frequency_hz,
                         "nearest-policy seed frequency in Hz (default: reader resonance)");

    FitOptions fit_opts;
    auto* fit = app.add_subcommand(
        "fit", "Fit a temperature-response model to a (temperature_c,value) CSV");
    fit->add_option("data", fit_opts.csv_path, "input CSV with temperature_c,value columns")
        ->required();
    fit->add_option("--kind", fit_opts.kind, "model kind (default auto)")
        ->check(CLI::IsMember({"linear", "exp_decay", "auto"}));
    fit->add_option("--out", fit_opts.out_model_path, "write the fitted model as JSON");
    fit->add_option("--freq-tag", fit_opts.frequency_tag_hz,
                    "measurement frequency tag in Hz stored with the model");

    CalibrateOptions cal_opts;
    auto* calibrate = app.add_subcommand(
        "calibrate", "Build a validated calibration curve from (temperature_c,f_r_hz) rows");
    calibrate->add_option("data", cal_opts.csv_path, "input CSV (e.g. simulate summary.csv)")
        ->required();
    calibrate->add_option("--out", cal_opts.out_path, "output curve CSV (default stdout)");
    calibrate->add_option("--note", cal_opts.metadata, "metadata line stored in the curve file");

    InvertOptions inv_opts;
    auto* invert = app.add_subcommand(
        "invert", "Convert measured resonant frequencies to temperatures");
    invert->add_option("curve", inv_opts.curve_path, "calibration curve CSV")->required();
    invert->add_option("--freq", inv_opts.frequencies_hz, "measured frequency in Hz")
        ->required()
        ->expected(-1);
    invert->add_flag("--strict", inv_opts.strict,
                     "error on out-of-range frequencies instead of clamping");

    ReportOptions rep_opts;
    auto* report = app.add_subcommand(
        "report", "Sensitivity report for a curve, or recompute a comparison table");
    report->add_option("curve", rep_opts.curve_path, "calibration curve CSV");
    report->add_option("--compare", rep_opts.compare_path,
                       "comparison table CSV (id,f0_mhz,slope_mhz_per_degc,"
                       "printed_freq_norm_pct_per_degc)");
    report->add_option("--out", rep_opts.out_path, "output CSV path (default stdout)");
    report->add_option("--flag-threshold", rep_opts.flag_threshold_pct,
                       "deviation percentage that flags a row (default 5)");

    try {
        app.parse(argc, argv);
        if (extract->parsed() && !band_text.empty()) {
            std::tie(extract_opts.band_lo_hz, extract_opts.band_hi_hz) = parse_band(band_text);
        }
        if (report->parsed() && rep_opts.curve_path.empty() && rep_opts.compare_path.empty()) {
            throw CLI::ValidationError("report", "needs a curve path or --compare table");
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (extract->parsed()) return cmd_extract(extract_opts);
        if (simulate->parsed()) return cmd_simulate(sim_opts);
        if (fit->parsed()) return cmd_fit(fit_opts);
        if (calibrate->parsed()) return cmd_calibrate(cal_opts);
        if (invert->parsed()) return cmd_invert(inv_opts);
        if (report->parsed()) return cmd_report(rep_opts);
    } catch (const lcsense::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitUsage;
}
