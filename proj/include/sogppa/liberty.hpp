#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sogppa {

struct LibertyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 2-D NLDM table: rows indexed by input slew (ns), columns by output load (fF).
struct LookupTable2D {
    std::vector<double> slew_axis;
    std::vector<double> load_axis;
    std::vector<double> values; // row-major, slew_axis.size() x load_axis.size()

    // bilinear inside the axis ranges, clamp-to-edge outside; 1x1 acts as a scalar
    double lookup(double slew, double load) const;
};

struct TimingArc {
    std::string from_pin;
    std::string to_pin;
    LookupTable2D delay;
    std::optional<LookupTable2D> slew;
};

struct LibPin {
    bool is_input = true;
    double capacitance_fF = 0.0;
};

struct Cell {
    std::string name;
    double area = 0.0;
    double leakage_uW = 0.0;
    std::map<std::string, LibPin> pins;
    std::vector<TimingArc> arcs;
    bool is_sequential = false;
    std::optional<double> internal_energy_fJ; // explicit attribute; else derived
    std::optional<double> setup_ns;           // sequential only
    std::optional<double> clk_to_q_ns;

    const std::string* output_pin() const;
};

struct LibUnits {
    double time_ns = 1.0;
    double cap_fF = 1.0;
    double voltage_V = 1.0;
    double leakage_uW = 1.0;
    double energy_fJ = 1.0;
};

class Library {
public:
    std::string name;
    LibUnits units;
    double nom_voltage = 1.0;
    std::map<std::string, Cell> cells;
    int warning_count = 0;

    const Cell& cell(const std::string& name) const;

    // (delay, output slew) from the cell's single output arc set; the worst
    // (max-delay) arc wins when several inputs drive the output
    std::pair<double, double> delay_of(const std::string& cell, double input_slew_ns,
                                       double load_fF) const;

    // attr in {area, leakage, internal_energy, setup, clk_to_q} or input_cap via pin arg
    double attr(const std::string& cell, const std::string& attr_name) const;
    double input_cap(const std::string& cell, const std::string& pin) const;
    double sum_input_caps(const std::string& cell) const;

    // internal energy: explicit attribute if present, else 0.5 * sum(Cin) * V^2
    double internal_energy(const std::string& cell) const;
};

Library parse_liberty(const std::string& text);
std::string print_liberty(const Library& lib);

// Defaults applied when a library omits sequential constraint data.
constexpr double kDefaultSetupNs = 0.04;
constexpr double kDefaultClkToQNs = 0.05;

} // namespace sogppa
