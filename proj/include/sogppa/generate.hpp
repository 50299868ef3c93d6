#pragma once

#include <cstdint>
#include <vector>

#include "sogppa/netlist.hpp"

namespace sogppa {

struct GenParams {
    uint64_t seed = 0;
    int n_stages = 2;          // pipeline depth (register banks between stages)
    int width_min = 1;
    int width_max = 8;
    int ops_per_stage = 4;
    std::vector<double> clock_set = {1.0}; // sampled per design

    void check() const;
};

// Deterministic function of params: equal params give a bit-identical
// design (and therefore bit-identical printed documents). The output is a
// layered pipeline; every stage boundary is a REG bank and the combinational
// subgraph is acyclic by construction.
WordDesign generate_design(const GenParams& params);

} // namespace sogppa
