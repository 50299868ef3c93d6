#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sogppa/timing.hpp"

namespace sogppa {

struct GoldenError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PowerConfig {
    double vdd_V = 1.0;
    int64_t mc_cycles = 1024;
    uint64_t seed = 0;
};

struct GoldenLabels {
    double wns_ns = 0.0;
    double tns_ns = 0.0;
    double power_uW = 0.0;
    double area_comb = 0.0;
    double area_seq = 0.0;
    // worst path delay per endpoint, keyed by (source identity, sink identity)
    std::map<std::pair<std::string, std::string>, double> path_delay_ns;
    int64_t nodes_before = 0;
    int64_t nodes_after = 0;
};

// Logic optimization to a structural fixed point: constant folding, double-NOT
// elimination, structural hashing, dead-node pruning. DFF nodes are never
// removed or merged, so register identities survive one-to-one.
SogGraph optimize(const SogGraph& graph);

struct MappedGraph {
    const SogGraph* graph = nullptr;
    std::vector<std::string> cell; // per node; empty for PI/PO/CONST
    double area_comb = 0.0;
    double area_seq = 0.0;
};

MappedGraph map_cells(const SogGraph& graph, const Library& lib, const TimingConfig& cfg);

// The reference flow the estimators learn to predict:
// lower -> optimize -> map -> exact STA, Monte-Carlo switching power, exact area.
GoldenLabels golden_label(const WordDesign& design, const Library& lib,
                          const PowerConfig& power_cfg, const TimingConfig& timing_cfg = {});

} // namespace sogppa
