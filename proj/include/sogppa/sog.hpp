#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sogppa/netlist.hpp"

namespace sogppa {

enum class SogKind : uint8_t { PI, PO, Const0, Const1, Not, And2, Or2, Xor2, Mux2, Dff };
constexpr int kNumSogKinds = 10;

const char* sog_kind_name(SogKind k);
std::optional<SogKind> sog_kind_from_name(const std::string& name);
int sog_arity(SogKind k);

struct SogNode {
    SogKind kind = SogKind::PI;
    std::vector<int> fanin;   // MUX2 order: select, then-leg, else-leg; DFF: d
    std::string identity;     // "net[i]" for PI/PO/DFF bits, empty for gates
};

struct SogGraph {
    std::string name;
    double clock_period_ns = 1.0;
    std::vector<SogNode> nodes;           // topologically ordered except DFF feedback
    std::vector<int> outputs;             // PO node ids
    std::vector<int> registers;           // DFF node ids
    std::map<std::string, int> name_map;  // bit identity -> node id

    void check() const; // kind closure, arity, DAG over combinational edges

    std::vector<std::vector<int>> fanouts() const;
    // level 0 for PI/CONST/DFF-q; gates at 1 + max fanin level; rewiring-free
    std::vector<int> levels() const;
};

struct DesignFeatures {
    std::array<int64_t, kNumSogKinds> kind_counts{};
    int64_t n_registers = 0;
    int64_t n_pi = 0;
    int64_t n_po = 0;
    int64_t combinational_depth = 0;
    int64_t total_fanout = 0;
    double mean_fanout = 0.0;
};

SogGraph lower(const WordDesign& design);

// single-bit two-valued simulation; DFFs initialize to 0
using SogStimulus = std::vector<std::map<std::string, uint64_t>>; // word-port values
WordTrace simulate_sog(const SogGraph& graph, const WordDesign& design,
                       const SogStimulus& stimulus);

struct EquivalenceVerdict {
    bool equivalent = true;
    WordStimulus counterexample; // first mismatching stimulus when not equivalent
    int64_t patterns_checked = 0;
    bool exhaustive = false;
};

// Exhaustive over all input combinations (held for 2 cycles) when the design
// has <= 16 total input bits; otherwise >= budget random multi-cycle stimuli.
EquivalenceVerdict check_equivalence(const WordDesign& design, const SogGraph& graph,
                                     int64_t budget = 10000);

DesignFeatures sog_features(const SogGraph& graph);

// Optional per-node p/alpha vectors are embedded when provided.
std::string print_sog(const SogGraph& graph, const std::vector<double>* p = nullptr,
                      const std::vector<double>* alpha = nullptr);

// Packed evaluator used by equivalence checking and Monte-Carlo activity:
// evaluates the whole graph on 64 stimulus lanes per word.
class PackedSim {
public:
    explicit PackedSim(const SogGraph& graph);
    // values: per PI node id, one 64-lane word. Steps one cycle; returns
    // per-node words after combinational settling, then clocks the DFFs.
    void step(const std::map<int, uint64_t>& pi_values);
    uint64_t value(int node) const { return values_[node]; }
    void reset();

private:
    const SogGraph& graph_;
    std::vector<int> order_; // combinational evaluation order
    std::vector<uint64_t> values_;
    std::vector<uint64_t> state_; // DFF q per register index
};

} // namespace sogppa
