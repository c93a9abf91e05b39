#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "lcsense/composite.hpp"
#include "lcsense/coupled.hpp"
#include "lcsense/extraction.hpp"
#include "lcsense/readout.hpp"
#include "lcsense/text.hpp"
#include "lcsense/touchstone.hpp"
#include "system_config.hpp"

namespace lcsense::cli {

namespace {

namespace fs = std::filesystem;

std::string format_g9(double v) {
    return text::format_general(v, 9);
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + out_path + "' for writing");
    }
    out << text;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;  // 1-based source lines

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw FormatError("missing column '" + name + "'");
    }
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#' && table.header.empty()) continue;  // leading metadata line
        if (table.header.empty()) {
            table.header = split_csv_line(line);
            continue;
        }
        std::vector<std::string> row = split_csv_line(line);
        if (row.size() != table.header.size()) {
            throw FormatError("row has " + std::to_string(row.size()) + " cells, expected " +
                                  std::to_string(table.header.size()),
                              line_no);
        }
        table.rows.push_back(std::move(row));
        table.row_lines.push_back(line_no);
    }
    if (table.header.empty()) {
        throw FormatError("empty CSV file");
    }
    return table;
}

double cell_number(const CsvTable& table, std::size_t row, std::size_t col) {
    const std::string& cell = table.rows[row][col];
    const auto v = text::parse_double(cell);
    if (!v) {
        throw FormatError("invalid number '" + cell + "' in column '" + table.header[col] + "'",
                          table.row_lines[row]);
    }
    return *v;
}

}  // namespace

int cmd_extract(const ExtractOptions& opts) {
    const extraction::Band band{opts.band_lo_hz, opts.band_hi_hz};
    std::optional<double> area_m2;
    if (opts.area_cm2) {
        area_m2 = *opts.area_cm2 * 1e-4;
    }

    std::ostringstream csv;
    csv << "file,band_mean_c_pf,band_std_c_pf,srf_mhz,mean_q";
    if (area_m2) csv << ",mean_c_pf_per_cm2,std_c_pf_per_cm2";
    csv << ",status\n";

    bool any_error = false;
    for (const std::string& file : opts.files) {
        try {
            const auto doc = touchstone::parse_file(file);
            const auto sweep = touchstone::to_one_port_sweep(doc);
            const auto report = extraction::extract(sweep, band, area_m2);
            csv << file << "," << format_g9(report.band_mean_c * 1e12) << ","
                << format_g9(report.band_std_c * 1e12) << ",";
            if (report.srf) csv << format_g9(*report.srf / 1e6);
            csv << "," << format_g9(report.band_mean_q);
            if (area_m2) {
                // F/m^2 -> pF/cm^2
                csv << "," << format_g9(*report.band_mean_c_per_area * 1e8) << ","
                    << format_g9(*report.band_std_c_per_area * 1e8);
            }
            csv << ",ok\n";
        } catch (const NoCapacitiveRegionError& e) {
            csv << file << ",,,,";
            if (area_m2) csv << ",,";
            csv << ",no-capacitive-region\n";
            std::cerr << file << ": " << e.what() << "\n";
            any_error = true;
        } catch (const Error& e) {
            std::cerr << file << ": " << e.what() << "\n";
            any_error = true;
        }
    }
    emit(csv.str(), opts.out_path);
    return any_error ? kExitDataError : kExitOk;
}

int cmd_simulate(const SimulateOptions& opts) {
    SystemConfig cfg;
    try {
        cfg = load_system_config(opts.config_path);
    } catch (const Error& e) {
        std::cerr << "config: " << e.what() << "\n";
        return kExitFormat;
    }

    const rfnet::FrequencyGrid grid = cfg.make_grid();
    fs::create_directories(opts.out_dir);

    const bool nearest = opts.track_policy == "nearest";
    const double reader_f0 = coupled::resonant_frequency(cfg.system.reader.inductance,
                                                         cfg.system.reader_tuning_capacitance);
    double cursor = opts.reference_frequency_hz.value_or(reader_f0);

    std::ostringstream summary;
    summary << "temperature_c,f_r_hz,depth_db,prominence_db\n";
    bool any_error = false;

    for (const double t : cfg.temperatures_c) {
        const auto sweep = coupled::sweep(cfg.system, grid, t);
        const std::string temp_str = text::format_general(t, 6);

        if (!sweep.failed_points.empty()) {
            std::cerr << "T=" << temp_str << ": " << sweep.failed_points.size()
                      << " singular conversion points\n";
            any_error = true;
        }

        const fs::path out_file =
            fs::path(opts.out_dir) /
            ("sweep_T" + temp_str + (opts.format == "csv" ? ".csv" : ".s2p"));
        try {
            if (opts.format == "csv") {
                std::ostringstream body;
                body << "f_hz,s11_db,s22_db,s21_db\n";
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    body << format_g9(grid[i]) << ","
                         << format_g9(rfnet::magnitude_db(sweep.s[i].m11)) << ","
                         << format_g9(rfnet::magnitude_db(sweep.s[i].m22)) << ","
                         << format_g9(rfnet::magnitude_db(sweep.s[i].m21)) << "\n";
                }
                emit(body.str(), out_file.string());
            } else {
                const auto doc =
                    touchstone::from_two_port_sweep(sweep, touchstone::FrequencyUnit::mhz);
                touchstone::write_file(doc, touchstone::Format::ri, out_file.string());
            }
        } catch (const Error& e) {
            std::cerr << "T=" << temp_str << ": " << e.what() << "\n";
            any_error = true;
        }

        // Tracked reader dip for the summary, per the selected policy.
        std::vector<double> s11_db(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            s11_db[i] = rfnet::magnitude_db(sweep.s[i].m11);
        }
        std::vector<readout::ResonancePeak> dips;
        try {
            dips = readout::find_dips(grid.points(), s11_db, opts.prominence_db);
        } catch (const Error& e) {
            std::cerr << "T=" << temp_str << ": " << e.what() << "\n";
            any_error = true;
        }
        summary << temp_str << ",";
        if (dips.empty()) {
            summary << ",,\n";
        } else {
            const readout::ResonancePeak* pick = &dips.front();
            if (nearest) {
                for (const auto& d : dips) {
                    const double dist = std::abs(d.frequency - cursor);
                    const double best = std::abs(pick->frequency - cursor);
                    if (dist < best || (dist == best && d.frequency < pick->frequency)) {
                        pick = &d;
                    }
                }
            } else {
                pick = &dips.back();  // sorted by frequency
            }
            cursor = pick->frequency;
            summary << format_g9(pick->frequency) << "," << format_g9(pick->depth_db) << ","
                    << format_g9(pick->prominence_db) << "\n";
        }
    }

    emit(summary.str(), (fs::path(opts.out_dir) / "summary.csv").string());
    return any_error ? kExitDataError : kExitOk;
}

int cmd_fit(const FitOptions& opts) {
    composite::TemperatureSeries series;
    try {
        const CsvTable table = read_csv_file(opts.csv_path);
        const std::size_t t_col = table.column("temperature_c");
        const std::size_t v_col = table.column("value");
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            series.points.emplace_back(cell_number(table, r, t_col),
                                       cell_number(table, r, v_col));
        }
        series.validate();
    } catch (const Error& e) {
        std::cerr << opts.csv_path << ": " << e.what() << "\n";
        return kExitFormat;
    }

    const composite::FitKind kind = opts.kind == "linear"      ? composite::FitKind::linear
                                    : opts.kind == "exp_decay" ? composite::FitKind::exp_decay
                                                               : composite::FitKind::auto_select;
    composite::FitResult result;
    try {
        result = composite::fit(series, kind);
    } catch (const FitError& e) {
        std::cerr << "fit: " << e.what() << "\n";
        return kExitDataError;
    }
    if (opts.frequency_tag_hz) {
        result.model.frequency_tag = *opts.frequency_tag_hz;
    }

    const double c_lo = result.model.capacitance_at(result.model.t_min);
    const double c_hi = result.model.capacitance_at(result.model.t_max);
    const double span = result.model.t_max - result.model.t_min;
    const double sens = 100.0 * std::abs(c_hi - c_lo) / c_lo / span;

    nlohmann::ordered_json j;
    j["kind"] = result.model.kind == composite::ResponseKind::linear ? "linear" : "exp_decay";
    j["c_ref_f"] = result.model.c_ref;
    j["t_ref_c"] = result.model.t_ref;
    if (result.model.kind == composite::ResponseKind::linear) {
        j["slope_rel_per_degc"] = result.model.slope_rel;
    } else {
        j["rr_max"] = result.model.rr_max;
        j["tau_degc"] = result.model.tau;
    }
    j["rmse"] = result.rmse;
    j["n_points"] = result.n_points;
    // Capacitance sensitivity tables in the wild carry an MHz/degC header for
    // what is numerically a relative percentage; emit the value under both labels.
    j["avg_sensitivity_pct_per_degc"] = sens;
    j["avg_sensitivity_table_s1_units_mhz_per_degc"] = sens;
    std::cout << j.dump(2) << "\n";

    if (!opts.out_model_path.empty()) {
        composite::save_model_file(result.model, opts.out_model_path);
    }
    return kExitOk;
}

int cmd_calibrate(const CalibrateOptions& opts) {
    std::vector<readout::CalibrationSample> samples;
    try {
        const CsvTable table = read_csv_file(opts.csv_path);
        const std::size_t t_col = table.column("temperature_c");
        const std::size_t f_col = table.column("f_r_hz");
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            samples.push_back(
                {cell_number(table, r, t_col), cell_number(table, r, f_col)});
        }
    } catch (const Error& e) {
        std::cerr << opts.csv_path << ": " << e.what() << "\n";
        return kExitFormat;
    }

    try {
        const auto curve = readout::CalibrationCurve::from_samples(std::move(samples));
        std::ostringstream out;
        readout::save_calibration_csv(curve, out, opts.metadata);
        emit(out.str(), opts.out_path);
    } catch (const Error& e) {
        std::cerr << opts.csv_path << ": " << e.what() << "\n";
        return kExitFormat;
    }
    return kExitOk;
}

int cmd_invert(const InvertOptions& opts) {
    std::optional<readout::CalibrationCurve> curve;
    try {
        curve = readout::load_calibration_csv_file(opts.curve_path);
    } catch (const Error& e) {
        std::cerr << opts.curve_path << ": " << e.what() << "\n";
        return kExitFormat;
    }

    const readout::InvertMode mode =
        opts.strict ? readout::InvertMode::strict : readout::InvertMode::clamp;
    std::ostringstream csv;
    csv << "f_r_hz,temperature_c\n";
    bool any_error = false;
    for (const double f : opts.frequencies_hz) {
        try {
            const double t = readout::invert(*curve, f, mode);
            csv << format_g9(f) << "," << format_g9(t) << "\n";
        } catch (const Error& e) {
            std::cerr << format_g9(f) << ": " << e.what() << "\n";
            any_error = true;
        }
    }
    std::cout << csv.str();
    return any_error ? kExitDataError : kExitOk;
}

int cmd_report(const ReportOptions& opts) {
    if (!opts.compare_path.empty()) {
        std::ostringstream csv;
        try {
            const CsvTable table = read_csv_file(opts.compare_path);
            const std::size_t id_col = table.column("id");
            const std::size_t f0_col = table.column("f0_mhz");
            const std::size_t slope_col = table.column("slope_mhz_per_degc");
            const std::size_t printed_col = table.column("printed_freq_norm_pct_per_degc");
            csv << "id,f0_mhz,slope_mhz_per_degc,printed_freq_norm_pct_per_degc,"
                   "recomputed_freq_norm_pct_per_degc,deviation_pct,flag\n";
            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                const double f0 = cell_number(table, r, f0_col);
                const double slope = cell_number(table, r, slope_col);
                const double printed = cell_number(table, r, printed_col);
                if (!(f0 > 0.0) || !(printed > 0.0)) {
                    throw FormatError("f0_mhz and printed values must be > 0",
                                      table.row_lines[r]);
                }
                const double recomputed = 100.0 * slope / f0;
                const double deviation = 100.0 * std::abs(recomputed - printed) / printed;
                csv << table.rows[r][id_col] << "," << format_g9(f0) << "," << format_g9(slope)
                    << "," << format_g9(printed) << "," << format_g9(recomputed) << ","
                    << format_g9(deviation) << ","
                    << (deviation > opts.flag_threshold_pct ? "inconsistent" : "ok") << "\n";
            }
        } catch (const Error& e) {
            std::cerr << opts.compare_path << ": " << e.what() << "\n";
            return kExitFormat;
        }
        emit(csv.str(), opts.out_path);
        return kExitOk;
    }

    try {
        const auto curve = readout::load_calibration_csv_file(opts.curve_path);
        const auto report = readout::sensitivity(curve);
        std::ostringstream csv;
        csv << "t_lo_c,t_hi_c,delta_f_hz,avg_sensitivity_pct_per_degc,slope_mhz_per_degc,"
               "freq_normalized_pct_per_degc,reference_frequency_hz\n";
        csv << format_g9(report.t_lo) << "," << format_g9(report.t_hi) << ","
            << format_g9(report.delta_f) << "," << format_g9(report.avg_sensitivity_pct_per_degc)
            << "," << format_g9(report.slope_mhz_per_degc) << ","
            << format_g9(report.freq_normalized_pct_per_degc) << ","
            << format_g9(report.reference_frequency) << "\n";
        emit(csv.str(), opts.out_path);
    } catch (const Error& e) {
        std::cerr << opts.curve_path << ": " << e.what() << "\n";
        return kExitFormat;
    }
    return kExitOk;
}

}  // namespace lcsense::cli
