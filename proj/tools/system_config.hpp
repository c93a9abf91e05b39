#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "lcsense/coupled.hpp"
#include "lcsense/rfnet.hpp"

namespace lcsense::cli {

/// Parsed and schema-validated simulation configuration. The on-disk form is
/// an INI-style document with [reader], [sensor], [sensor_capacitor] and
/// [grid] sections plus top-level k / port_impedance_ohm / temperatures_c;
/// unknown sections or keys are rejected with their dotted key path.
struct SystemConfig {
    coupled::CoupledSystem system;
    double grid_start_hz = 0.0;
    double grid_stop_hz = 0.0;
    std::size_t grid_points = 0;
    std::vector<double> temperatures_c;

    rfnet::FrequencyGrid make_grid() const {
        return rfnet::FrequencyGrid::linspace(grid_start_hz, grid_stop_hz, grid_points);
    }
};

/// Throws FormatError carrying the offending key path (and line number when
/// the violation is syntactic).
SystemConfig parse_system_config(std::istream& in);
SystemConfig parse_system_config(const std::string& text);
SystemConfig load_system_config(const std::string& path);

}  // namespace lcsense::cli
