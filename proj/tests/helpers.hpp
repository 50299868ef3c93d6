#pragma once

#include <string>

#include "sogppa/generate.hpp"
#include "sogppa/liberty.hpp"
#include "sogppa/manifest.hpp"

namespace test_helpers {

inline std::string fixture_dir() { return SOGPPA_FIXTURE_DIR; }

inline sogppa::Library load_techlib() {
    return sogppa::parse_liberty(sogppa::read_file(fixture_dir() + "/techlib.lib"));
}

// the mixed-operator design used by several suites; see the frozen trace in
// the netlist tests
inline sogppa::WordDesign small_alu() {
    using namespace sogppa;
    WordDesign d;
    d.name = "alu";
    d.clock_period_ns = 1.0;
    d.ports = {{"a", true, 4}, {"b", true, 4}, {"sel", true, 1},
               {"y", false, 4}, {"flag", false, 1}};
    d.nets = {{"sum", 4}, {"diff", 4}, {"pick", 4}, {"lt", 1}, {"sh", 4}};
    WordNode n;
    n = {}; n.kind = WordKind::Add; n.inputs = {"a", "b"}; n.output = "sum"; d.nodes.push_back(n);
    n = {}; n.kind = WordKind::Sub; n.inputs = {"a", "b"}; n.output = "diff"; d.nodes.push_back(n);
    n = {}; n.kind = WordKind::Mux; n.inputs = {"sel", "sum", "diff"}; n.output = "pick"; d.nodes.push_back(n);
    n = {}; n.kind = WordKind::Lt; n.inputs = {"a", "b"}; n.output = "lt"; d.nodes.push_back(n);
    n = {}; n.kind = WordKind::Shl; n.inputs = {"pick"}; n.shift_amount = 1; n.output = "sh"; d.nodes.push_back(n);
    n = {}; n.kind = WordKind::Reg; n.inputs = {"sh"}; n.enable = "lt"; n.output = "y"; d.nodes.push_back(n);
    n = {}; n.kind = WordKind::RedXor; n.inputs = {"sum"}; n.output = "flag"; d.nodes.push_back(n);
    d.validate();
    return d;
}

inline sogppa::WordDesign generated(uint64_t seed, int stages = 2, int width_max = 4,
                                    int ops = 5) {
    sogppa::GenParams p;
    p.seed = seed;
    p.n_stages = stages;
    p.width_max = width_max;
    p.ops_per_stage = ops;
    return sogppa::generate_design(p);
}

} // namespace test_helpers
