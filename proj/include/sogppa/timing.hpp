#pragma once

#include <map>
#include <string>
#include <vector>

#include "sogppa/liberty.hpp"
#include "sogppa/sog.hpp"

namespace sogppa {

struct TimingConfig {
    double default_input_slew_ns = 0.02;
    double wire_cap_per_fanout_fF = 1.0;
    double po_load_fF = 2.0;
    std::map<SogKind, std::string> cell_binding = {
        {SogKind::Not, "INV_X1"},   {SogKind::And2, "AND2_X1"},
        {SogKind::Or2, "OR2_X1"},   {SogKind::Xor2, "XOR2_X1"},
        {SogKind::Mux2, "MUX2_X1"}, {SogKind::Dff, "DFF_X1"},
    };
    // defaults used when the bound DFF cell lacks the data
    double default_setup_ns = kDefaultSetupNs;
    double default_clk_to_q_ns = kDefaultClkToQNs;

    const std::string& cell_for(SogKind k) const;
};

struct AnnotatedGraph {
    const SogGraph* graph = nullptr;
    std::vector<double> delay_ns;  // per node; 0 for PI/PO/CONST
    std::vector<double> slew_ns;   // output slew per node
    std::vector<double> load_fF;   // per node
    double setup_ns = 0.0;
    double clk_to_q_ns = 0.0;
};

struct Endpoint {
    int node = -1;         // PO node or DFF node (its d pin)
    bool is_register = false;
    std::string identity;  // PO identity or DFF bit identity
    double arrival_ns = 0.0;
    double slack_ns = 0.0;
};

struct TimingResult {
    std::vector<double> arrival_ns; // per node
    std::vector<Endpoint> endpoints;
    double wns_r = 0.0;
    double tns_r = 0.0;
};

struct Path {
    std::string source_identity; // PI name or DFF q identity
    std::string sink_identity;   // PO identity or DFF d identity
    std::vector<int> nodes;      // launch point first, endpoint last
    double analytical_delay_ns = 0.0;
    double slack_ns = 0.0;
    bool endpoint_is_register = false;
};

struct PathFeatureVector {
    int64_t n_ops = 0;
    int64_t n_not = 0, n_and = 0, n_or = 0, n_xor = 0, n_mux = 0;
    double accumulated_delay_ns = 0.0;
    int64_t max_fanout = 0;
    bool endpoint_is_register = false;

    std::vector<double> as_row() const;
    static constexpr int kDim = 9;
};

AnnotatedGraph annotate(const SogGraph& graph, const Library& lib, const TimingConfig& cfg);

TimingResult sta(const AnnotatedGraph& annotated, double clock_period_ns);

// One worst path per endpoint via argmax-predecessor backtracking (ties go to
// the lowest node id), sorted by ascending slack. Returns the worst
// K = min(N, max(16, ceil(fraction * N))) paths.
std::vector<Path> worst_paths(const TimingResult& result, const AnnotatedGraph& annotated,
                              double fraction = 0.01);

PathFeatureVector path_features(const Path& path, const AnnotatedGraph& annotated);

std::string print_timing_report(const TimingResult& result, const std::vector<Path>& paths,
                                const AnnotatedGraph& annotated);

} // namespace sogppa
