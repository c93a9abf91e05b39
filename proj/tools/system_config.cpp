#include "system_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "lcsense/composite.hpp"
#include "lcsense/errors.hpp"
#include "lcsense/text.hpp"

namespace lcsense::cli {

namespace {

struct Entry {
    std::string value;
    std::size_t line = 0;
    bool consumed = false;
};

using Section = std::map<std::string, Entry>;

struct RawConfig {
    std::map<std::string, Section> sections;  // "" is the top level
    std::filesystem::path base_dir;
};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

RawConfig read_ini(std::istream& in) {
    RawConfig cfg;
    cfg.sections[""];
    std::string current;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        if (text.front() == '[') {
            if (text.back() != ']') {
                throw FormatError("unterminated section header", line_no);
            }
            current = trim(text.substr(1, text.size() - 2));
            if (current.empty()) {
                throw FormatError("empty section name", line_no);
            }
            if (cfg.sections.count(current)) {
                throw FormatError("duplicate section [" + current + "]", line_no);
            }
            cfg.sections[current];
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw FormatError("expected 'key = value'", line_no);
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty()) {
            throw FormatError("empty key", line_no);
        }
        Section& section = cfg.sections[current];
        if (section.count(key)) {
            throw FormatError((current.empty() ? key : current + "." + key) + ": duplicate key",
                              line_no);
        }
        section[key] = Entry{value, line_no, false};
    }
    return cfg;
}

std::string key_path(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
}

class SchemaReader {
public:
    explicit SchemaReader(RawConfig& cfg) : cfg_(cfg) {}

    Entry* find(const std::string& section, const std::string& key) {
        auto sit = cfg_.sections.find(section);
        if (sit == cfg_.sections.end()) return nullptr;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return nullptr;
        kit->second.consumed = true;
        return &kit->second;
    }

    double number(const std::string& section, const std::string& key) {
        Entry* e = find(section, key);
        if (!e) {
            throw FormatError(key_path(section, key) + ": missing required key");
        }
        return parse_number(section, key, *e);
    }

    double number_or(const std::string& section, const std::string& key, double fallback) {
        Entry* e = find(section, key);
        return e ? parse_number(section, key, *e) : fallback;
    }

    void require_section(const std::string& name) {
        if (!cfg_.sections.count(name)) {
            throw FormatError("missing required section [" + name + "]");
        }
    }

    /// Every key must have been consumed and every section recognized.
    void reject_unknown(const std::vector<std::string>& known_sections) {
        for (const auto& [name, section] : cfg_.sections) {
            if (std::find(known_sections.begin(), known_sections.end(), name) ==
                known_sections.end()) {
                throw FormatError("unknown section [" + name + "]",
                                  section.empty() ? 0 : section.begin()->second.line);
            }
            for (const auto& [key, entry] : section) {
                if (!entry.consumed) {
                    throw FormatError(key_path(name, key) + ": unknown key", entry.line);
                }
            }
        }
    }

private:
    double parse_number(const std::string& section, const std::string& key, const Entry& e) {
        const auto v = text::parse_double(e.value);
        if (!v) {
            throw FormatError(key_path(section, key) + ": invalid number '" + e.value + "'",
                              e.line);
        }
        return *v;
    }

    RawConfig& cfg_;
};

std::vector<double> parse_temperature_list(const std::string& value, std::size_t line) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        const auto v = text::parse_double(t);
        if (!v) {
            throw FormatError("temperatures_c: invalid entry '" + t + "'", line);
        }
        out.push_back(*v);
    }
    if (out.empty()) {
        throw FormatError("temperatures_c: list is empty", line);
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i] <= out[i - 1]) {
            throw FormatError("temperatures_c: must be strictly increasing", line);
        }
    }
    return out;
}

SystemConfig build(RawConfig& raw) {
    SchemaReader reader(raw);
    SystemConfig cfg;

    reader.require_section("reader");
    reader.require_section("sensor");
    reader.require_section("sensor_capacitor");
    reader.require_section("grid");

    cfg.system.reader.inductance = reader.number("reader", "inductance_h");
    cfg.system.reader.resistance = reader.number_or("reader", "resistance_ohm", 0.0);
    cfg.system.reader.self_capacitance =
        reader.number_or("reader", "self_capacitance_f", 0.0);
    const Entry* cr = reader.find("reader", "capacitance_f");
    const Entry* ft = reader.find("reader", "f_target_hz");
    if ((cr == nullptr) == (ft == nullptr)) {
        throw FormatError("reader: exactly one of capacitance_f or f_target_hz is required");
    }
    if (cr) {
        cfg.system.reader_tuning_capacitance = reader.number("reader", "capacitance_f");
    } else {
        const double f_target = reader.number("reader", "f_target_hz");
        if (!(f_target > 0.0)) {
            throw FormatError("reader.f_target_hz: must be > 0", ft->line);
        }
        cfg.system.reader_tuning_capacitance =
            coupled::solve_tuning_capacitor(cfg.system.reader.inductance, f_target);
    }

    cfg.system.sensor.inductance = reader.number("sensor", "inductance_h");
    cfg.system.sensor.resistance = reader.number_or("sensor", "resistance_ohm", 0.0);
    cfg.system.sensor.self_capacitance =
        reader.number_or("sensor", "self_capacitance_f", 0.0);

    const Entry* cs = reader.find("sensor_capacitor", "capacitance_f");
    const Entry* model_file = reader.find("sensor_capacitor", "model_file");
    if ((cs == nullptr) == (model_file == nullptr)) {
        throw FormatError(
            "sensor_capacitor: exactly one of capacitance_f or model_file is required");
    }
    const Entry* tag = reader.find("sensor_capacitor", "frequency_tag_hz");
    if (cs) {
        if (tag) {
            throw FormatError("sensor_capacitor.frequency_tag_hz: only valid with model_file",
                              tag->line);
        }
        cfg.system.sensor_capacitance = reader.number("sensor_capacitor", "capacitance_f");
    } else {
        std::filesystem::path path(model_file->value);
        if (path.is_relative()) path = raw.base_dir / path;
        composite::CompositeResponseModel model;
        try {
            model = composite::load_model_file(path.string());
        } catch (const Error& e) {
            throw FormatError("sensor_capacitor.model_file: " + std::string(e.what()),
                              model_file->line);
        }
        if (tag) {
            const double tag_hz = reader.number("sensor_capacitor", "frequency_tag_hz");
            // Models at different measurement frequencies are distinct devices;
            // a declared tag must match the model file's own tag.
            if (model.frequency_tag && *model.frequency_tag != tag_hz) {
                throw FormatError("sensor_capacitor.frequency_tag_hz: model file is tagged " +
                                      std::to_string(*model.frequency_tag) + " Hz",
                                  tag->line);
            }
            model.frequency_tag = tag_hz;
        }
        cfg.system.sensor_capacitance = model;
    }

    cfg.system.k = reader.number("", "k");
    cfg.system.port_impedance =
        reader.number_or("", "port_impedance_ohm", rfnet::kDefaultReferenceImpedance);

    cfg.grid_start_hz = reader.number("grid", "start_hz");
    cfg.grid_stop_hz = reader.number("grid", "stop_hz");
    const double points = reader.number("grid", "points");
    if (points < 2.0 || points != std::floor(points) || points > 10e6) {
        throw FormatError("grid.points: must be an integer >= 2");
    }
    cfg.grid_points = static_cast<std::size_t>(points);
    if (!(cfg.grid_start_hz > 0.0) || !(cfg.grid_start_hz < cfg.grid_stop_hz)) {
        throw FormatError("grid: requires 0 < start_hz < stop_hz");
    }

    Entry* temps = reader.find("", "temperatures_c");
    if (!temps) {
        throw FormatError("temperatures_c: missing required key");
    }
    cfg.temperatures_c = parse_temperature_list(temps->value, temps->line);

    reader.reject_unknown({"", "reader", "sensor", "sensor_capacitor", "grid"});

    try {
        cfg.system.validate();
    } catch (const DomainError& e) {
        throw FormatError(std::string("config: ") + e.what());
    }
    return cfg;
}

}  // namespace

SystemConfig parse_system_config(std::istream& in) {
    RawConfig raw = read_ini(in);
    raw.base_dir = std::filesystem::current_path();
    return build(raw);
}

SystemConfig parse_system_config(const std::string& text) {
    std::istringstream ss(text);
    return parse_system_config(ss);
}

SystemConfig load_system_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "'");
    }
    RawConfig raw = read_ini(in);
    raw.base_dir = std::filesystem::path(path).parent_path();
    return build(raw);
}

}  // namespace lcsense::cli
