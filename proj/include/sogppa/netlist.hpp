#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sogppa {

struct NetlistError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class WordKind {
    Const, Not, And, Or, Xor, Add, Sub, Mux, Eq, Lt,
    Shl, Shr, Concat, Slice, RedOr, RedAnd, RedXor, Reg
};

const char* word_kind_name(WordKind k);
std::optional<WordKind> word_kind_from_name(const std::string& name);

struct Port {
    std::string name;
    bool is_input = true;
    int width = 1;
};

struct WordNode {
    WordKind kind = WordKind::Not;
    std::vector<std::string> inputs; // net names; MUX order is (sel, then, else)
    std::string output;
    // kind-specific params
    uint64_t const_value = 0;  // CONST
    int shift_amount = 0;      // SHL/SHR
    int slice_hi = 0;          // SLICE
    int slice_lo = 0;
    std::string enable;        // REG, optional
};

struct WordDesign {
    std::string name;
    double clock_period_ns = 1.0;
    std::vector<Port> ports;
    std::vector<std::pair<std::string, int>> nets; // internal nets (ports declare their own)
    std::vector<WordNode> nodes;

    int width_of(const std::string& net) const;
    bool has_net(const std::string& net) const;

    // Validates every type invariant: single drivers, width rules,
    // acyclicity of the combinational subgraph, resolvable references.
    void validate() const;

private:
    mutable std::map<std::string, int> width_cache_;
    void build_width_cache() const;
};

WordDesign parse_netlist(const std::string& text);
std::string print_netlist(const WordDesign& design);

// Cycle-accurate two-valued simulation. stimulus[cycle][input_port] = value
// (masked to port width). Registers initialize to 0, capture at each cycle
// boundary. Returns per-cycle values of every output port.
using WordStimulus = std::vector<std::map<std::string, uint64_t>>;
using WordTrace = std::vector<std::map<std::string, uint64_t>>;
WordTrace simulate_word(const WordDesign& design, const WordStimulus& stimulus);

} // namespace sogppa
