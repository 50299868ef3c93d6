#include "sogppa/sog.hpp"

#include <algorithm>
#include <functional>

#include <json.hpp>

#include "sogppa/rng.hpp"

namespace sogppa {

using json = nlohmann::ordered_json;

namespace {

const std::pair<SogKind, const char*> kSogKindNames[] = {
    {SogKind::PI, "PI"},         {SogKind::PO, "PO"},     {SogKind::Const0, "CONST0"},
    {SogKind::Const1, "CONST1"}, {SogKind::Not, "NOT"},   {SogKind::And2, "AND2"},
    {SogKind::Or2, "OR2"},       {SogKind::Xor2, "XOR2"}, {SogKind::Mux2, "MUX2"},
    {SogKind::Dff, "DFF"},
};

// builds a SogGraph with constant-folding constructors; ids stay topological
class Builder {
public:
    SogGraph g;
    int const0 = -1, const1 = -1;

    int add(SogKind kind, std::vector<int> fanin, std::string identity = "") {
        g.nodes.push_back({kind, std::move(fanin), std::move(identity)});
        return static_cast<int>(g.nodes.size()) - 1;
    }
    int constant(bool one) {
        int& id = one ? const1 : const0;
        if (id < 0) id = add(one ? SogKind::Const1 : SogKind::Const0, {});
        return id;
    }
    bool is_const(int n, bool one) const {
        return g.nodes[n].kind == (one ? SogKind::Const1 : SogKind::Const0);
    }
    int mk_not(int a) {
        if (is_const(a, false)) return constant(true);
        if (is_const(a, true)) return constant(false);
        return add(SogKind::Not, {a});
    }
    int mk_and(int a, int b) {
        if (is_const(a, false) || is_const(b, false)) return constant(false);
        if (is_const(a, true)) return b;
        if (is_const(b, true)) return a;
        return add(SogKind::And2, {a, b});
    }
    int mk_or(int a, int b) {
        if (is_const(a, true) || is_const(b, true)) return constant(true);
        if (is_const(a, false)) return b;
        if (is_const(b, false)) return a;
        return add(SogKind::Or2, {a, b});
    }
    int mk_xor(int a, int b) {
        if (is_const(a, false)) return b;
        if (is_const(b, false)) return a;
        if (is_const(a, true)) return mk_not(b);
        if (is_const(b, true)) return mk_not(a);
        return add(SogKind::Xor2, {a, b});
    }
    int mk_mux(int s, int a, int b) { // s ? a : b
        if (is_const(s, true)) return a;
        if (is_const(s, false)) return b;
        if (a == b) return a;
        return add(SogKind::Mux2, {s, a, b});
    }
    int reduce(SogKind op, const std::vector<int>& bits) {
        // balanced tree
        std::vector<int> level = bits;
        while (level.size() > 1) {
            std::vector<int> next;
            for (size_t i = 0; i + 1 < level.size(); i += 2) {
                switch (op) {
                case SogKind::And2: next.push_back(mk_and(level[i], level[i + 1])); break;
                case SogKind::Or2: next.push_back(mk_or(level[i], level[i + 1])); break;
                default: next.push_back(mk_xor(level[i], level[i + 1])); break;
                }
            }
            if (level.size() & 1) next.push_back(level.back());
            level = std::move(next);
        }
        return level.empty() ? constant(op == SogKind::And2) : level[0];
    }
};

} // namespace

const char* sog_kind_name(SogKind k) {
    for (const auto& [kind, name] : kSogKindNames)
        if (kind == k) return name;
    return "?";
}

std::optional<SogKind> sog_kind_from_name(const std::string& name) {
    for (const auto& [kind, kname] : kSogKindNames)
        if (name == kname) return kind;
    return std::nullopt;
}

int sog_arity(SogKind k) {
    switch (k) {
    case SogKind::PI:
    case SogKind::Const0:
    case SogKind::Const1: return 0;
    case SogKind::PO:
    case SogKind::Not:
    case SogKind::Dff: return 1;
    case SogKind::And2:
    case SogKind::Or2:
    case SogKind::Xor2: return 2;
    case SogKind::Mux2: return 3;
    }
    return 0;
}

void SogGraph::check() const {
    const int n = static_cast<int>(nodes.size());
    for (int i = 0; i < n; ++i) {
        const auto& nd = nodes[i];
        if (static_cast<int>(nd.fanin.size()) != sog_arity(nd.kind))
            throw NetlistError("node " + std::to_string(i) + " violates arity");
        for (int f : nd.fanin) {
            if (f < 0 || f >= n) throw NetlistError("fanin id out of range");
            // combinational edges must point backwards; DFF q edges may not
            if (nd.kind != SogKind::Dff && f >= i && nodes[f].kind != SogKind::Dff)
                throw NetlistError("combinational edge violates topological order");
        }
    }
}

std::vector<std::vector<int>> SogGraph::fanouts() const {
    std::vector<std::vector<int>> fo(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i)
        for (int f : nodes[i].fanin) fo[f].push_back(static_cast<int>(i));
    return fo;
}

std::vector<int> SogGraph::levels() const {
    std::vector<int> lvl(nodes.size(), 0);
    for (size_t i = 0; i < nodes.size(); ++i) {
        const auto& nd = nodes[i];
        switch (nd.kind) {
        case SogKind::PI:
        case SogKind::Const0:
        case SogKind::Const1:
        case SogKind::Dff: lvl[i] = 0; break;
        case SogKind::PO: lvl[i] = lvl[nd.fanin[0]]; break;
        default: {
            int m = 0;
            for (int f : nd.fanin) m = std::max(m, nodes[f].kind == SogKind::Dff ? 0 : lvl[f]);
            lvl[i] = m + 1;
            break;
        }
        }
    }
    return lvl;
}

SogGraph lower(const WordDesign& design) {
    Builder b;
    b.g.name = design.name;
    b.g.clock_period_ns = design.clock_period_ns;

    std::map<std::string, std::vector<int>> bits; // net -> node id per bit

    for (const auto& p : design.ports) {
        if (!p.is_input) continue;
        auto& v = bits[p.name];
        for (int i = 0; i < p.width; ++i)
            v.push_back(b.add(SogKind::PI, {}, p.name + "[" + std::to_string(i) + "]"));
    }

    // DFF bits first so register feedback resolves; d cones wired afterwards
    std::vector<std::pair<const WordNode*, std::vector<int>>> regs;
    for (const auto& nd : design.nodes) {
        if (nd.kind != WordKind::Reg) continue;
        const int w = design.width_of(nd.output);
        auto& v = bits[nd.output];
        for (int i = 0; i < w; ++i)
            v.push_back(b.add(SogKind::Dff, {-1}, nd.output + "[" + std::to_string(i) + "]"));
        regs.emplace_back(&nd, v);
    }

    // combinational nodes in dependency order
    std::map<std::string, const WordNode*> driver;
    for (const auto& nd : design.nodes)
        if (nd.kind != WordKind::Reg) driver[nd.output] = &nd;

    std::vector<const WordNode*> order;
    {
        std::map<const WordNode*, bool> done;
        std::vector<std::pair<const WordNode*, bool>> stack;
        for (const auto& nd : design.nodes) {
            if (nd.kind == WordKind::Reg || done[&nd]) continue;
            stack.emplace_back(&nd, false);
            while (!stack.empty()) {
                auto [cur, expanded] = stack.back();
                stack.pop_back();
                if (done[cur]) continue;
                if (expanded) {
                    done[cur] = true;
                    order.push_back(cur);
                    continue;
                }
                stack.emplace_back(cur, true);
                for (const auto& in : cur->inputs) {
                    auto it = driver.find(in);
                    if (it != driver.end() && !done[it->second])
                        stack.emplace_back(it->second, false);
                }
            }
        }
    }

    for (const WordNode* nd : order) {
        const int ow = design.width_of(nd->output);
        auto in_bits = [&](size_t i) -> const std::vector<int>& {
            return bits.at(nd->inputs[i]);
        };
        // zero-extended view of an operand
        auto ext = [&](const std::vector<int>& v, int i) {
            return i < static_cast<int>(v.size()) ? v[i] : b.constant(false);
        };
        std::vector<int> out;
        switch (nd->kind) {
        case WordKind::Const:
            for (int i = 0; i < ow; ++i)
                out.push_back(b.constant((nd->const_value >> i) & 1));
            break;
        case WordKind::Not:
            for (int i = 0; i < ow; ++i) out.push_back(b.mk_not(in_bits(0)[i]));
            break;
        case WordKind::And:
            for (int i = 0; i < ow; ++i)
                out.push_back(b.mk_and(in_bits(0)[i], in_bits(1)[i]));
            break;
        case WordKind::Or:
            for (int i = 0; i < ow; ++i)
                out.push_back(b.mk_or(in_bits(0)[i], in_bits(1)[i]));
            break;
        case WordKind::Xor:
            for (int i = 0; i < ow; ++i)
                out.push_back(b.mk_xor(in_bits(0)[i], in_bits(1)[i]));
            break;
        case WordKind::Add: {
            int carry = b.constant(false);
            for (int i = 0; i < ow; ++i) {
                int a = ext(in_bits(0), i), c = ext(in_bits(1), i);
                int axb = b.mk_xor(a, c);
                out.push_back(b.mk_xor(axb, carry));
                if (i + 1 < ow)
                    carry = b.mk_or(b.mk_and(a, c), b.mk_and(carry, axb));
            }
            break;
        }
        case WordKind::Sub: {
            // a - b = a + ~b + 1 (ripple with complemented b, carry-in 1)
            int carry = b.constant(true);
            for (int i = 0; i < ow; ++i) {
                int a = ext(in_bits(0), i);
                int nb = b.mk_not(ext(in_bits(1), i));
                int axb = b.mk_xor(a, nb);
                out.push_back(b.mk_xor(axb, carry));
                if (i + 1 < ow)
                    carry = b.mk_or(b.mk_and(a, nb), b.mk_and(carry, axb));
            }
            break;
        }
        case WordKind::Mux: {
            const int sel = in_bits(0)[0];
            for (int i = 0; i < ow; ++i)
                out.push_back(b.mk_mux(sel, in_bits(1)[i], in_bits(2)[i]));
            break;
        }
        case WordKind::Eq: {
            std::vector<int> diff;
            for (size_t i = 0; i < in_bits(0).size(); ++i)
                diff.push_back(b.mk_xor(in_bits(0)[i], in_bits(1)[i]));
            out.push_back(b.mk_not(b.reduce(SogKind::Or2, diff)));
            break;
        }
        case WordKind::Lt: {
            // unsigned borrow chain from the LSB
            int borrow = b.constant(false);
            for (size_t i = 0; i < in_bits(0).size(); ++i) {
                int a = in_bits(0)[i], c = in_bits(1)[i];
                int t1 = b.mk_and(b.mk_not(a), c);
                int t2 = b.mk_and(b.mk_not(b.mk_xor(a, c)), borrow);
                borrow = b.mk_or(t1, t2);
            }
            out.push_back(borrow);
            break;
        }
        case WordKind::Shl:
            for (int i = 0; i < ow; ++i)
                out.push_back(i < nd->shift_amount ? b.constant(false)
                                                   : in_bits(0)[i - nd->shift_amount]);
            break;
        case WordKind::Shr:
            for (int i = 0; i < ow; ++i)
                out.push_back(i + nd->shift_amount < static_cast<int>(in_bits(0).size())
                                  ? in_bits(0)[i + nd->shift_amount]
                                  : b.constant(false));
            break;
        case WordKind::Concat: {
            for (const auto& in : nd->inputs)
                for (int id : bits.at(in)) out.push_back(id);
            break;
        }
        case WordKind::Slice:
            for (int i = nd->slice_lo; i <= nd->slice_hi; ++i)
                out.push_back(in_bits(0)[i]);
            break;
        case WordKind::RedOr: out.push_back(b.reduce(SogKind::Or2, in_bits(0))); break;
        case WordKind::RedAnd: out.push_back(b.reduce(SogKind::And2, in_bits(0))); break;
        case WordKind::RedXor: out.push_back(b.reduce(SogKind::Xor2, in_bits(0))); break;
        case WordKind::Reg: break;
        }
        bits[nd->output] = std::move(out);
    }

    // wire register d inputs (enable lowers to d' = MUX2(e, d, q))
    for (auto& [nd, qbits] : regs) {
        const auto& dbits = bits.at(nd->inputs[0]);
        for (size_t i = 0; i < qbits.size(); ++i) {
            int d = dbits[i];
            if (!nd->enable.empty())
                d = b.mk_mux(bits.at(nd->enable)[0], d, qbits[i]);
            b.g.nodes[qbits[i]].fanin = {d};
        }
    }

    // POs
    for (const auto& p : design.ports) {
        if (p.is_input) continue;
        const auto& v = bits.at(p.name);
        for (int i = 0; i < p.width; ++i)
            b.add(SogKind::PO, {v[i]}, "po:" + p.name + "[" + std::to_string(i) + "]");
    }

    // prune combinational nodes outside every PO / DFF-d cone; keep PI, PO, DFF
    SogGraph& g = b.g;
    std::vector<char> keep(g.nodes.size(), 0);
    std::vector<int> work;
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        auto k = g.nodes[i].kind;
        if (k == SogKind::PI || k == SogKind::PO || k == SogKind::Dff) {
            keep[i] = 1;
            for (int f : g.nodes[i].fanin) work.push_back(f);
        }
    }
    while (!work.empty()) {
        int n = work.back();
        work.pop_back();
        if (keep[n]) continue;
        keep[n] = 1;
        if (g.nodes[n].kind != SogKind::Dff)
            for (int f : g.nodes[n].fanin) work.push_back(f);
    }

    SogGraph out;
    out.name = g.name;
    out.clock_period_ns = g.clock_period_ns;
    std::vector<int> remap(g.nodes.size(), -1);
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        if (!keep[i]) continue;
        remap[i] = static_cast<int>(out.nodes.size());
        out.nodes.push_back(g.nodes[i]);
    }
    for (auto& nd : out.nodes)
        for (int& f : nd.fanin) f = remap[f];
    for (size_t i = 0; i < out.nodes.size(); ++i) {
        const auto& nd = out.nodes[i];
        if (nd.kind == SogKind::PO) out.outputs.push_back(static_cast<int>(i));
        if (nd.kind == SogKind::Dff) out.registers.push_back(static_cast<int>(i));
        if (!nd.identity.empty()) out.name_map[nd.identity] = static_cast<int>(i);
    }
    out.check();
    return out;
}

PackedSim::PackedSim(const SogGraph& graph) : graph_(graph) {
    values_.resize(graph.nodes.size(), 0);
    state_.resize(graph.registers.size(), 0);
    for (size_t i = 0; i < graph.nodes.size(); ++i)
        if (graph.nodes[i].kind != SogKind::Dff) order_.push_back(static_cast<int>(i));
}

void PackedSim::reset() {
    std::fill(values_.begin(), values_.end(), 0);
    std::fill(state_.begin(), state_.end(), 0);
}

void PackedSim::step(const std::map<int, uint64_t>& pi_values) {
    const auto& nodes = graph_.nodes;
    for (size_t r = 0; r < graph_.registers.size(); ++r)
        values_[graph_.registers[r]] = state_[r];
    for (const auto& [id, v] : pi_values) values_[id] = v;
    for (int i : order_) {
        const auto& nd = nodes[i];
        switch (nd.kind) {
        case SogKind::PI: break;
        case SogKind::Const0: values_[i] = 0; break;
        case SogKind::Const1: values_[i] = ~0ULL; break;
        case SogKind::Not: values_[i] = ~values_[nd.fanin[0]]; break;
        case SogKind::And2: values_[i] = values_[nd.fanin[0]] & values_[nd.fanin[1]]; break;
        case SogKind::Or2: values_[i] = values_[nd.fanin[0]] | values_[nd.fanin[1]]; break;
        case SogKind::Xor2: values_[i] = values_[nd.fanin[0]] ^ values_[nd.fanin[1]]; break;
        case SogKind::Mux2: {
            uint64_t s = values_[nd.fanin[0]];
            values_[i] = (s & values_[nd.fanin[1]]) | (~s & values_[nd.fanin[2]]);
            break;
        }
        case SogKind::PO: values_[i] = values_[nd.fanin[0]]; break;
        case SogKind::Dff: break;
        }
    }
    for (size_t r = 0; r < graph_.registers.size(); ++r)
        state_[r] = values_[graph_.nodes[graph_.registers[r]].fanin[0]];
}

WordTrace simulate_sog(const SogGraph& graph, const WordDesign& design,
                       const SogStimulus& stimulus) {
    if (stimulus.empty()) throw NetlistError("cycle count must be >= 1");
    PackedSim sim(graph);
    WordTrace trace;
    for (const auto& cycle : stimulus) {
        std::map<int, uint64_t> pi;
        for (const auto& p : design.ports) {
            if (!p.is_input) continue;
            auto it = cycle.find(p.name);
            if (it == cycle.end())
                throw NetlistError("stimulus missing input '" + p.name + "'");
            for (int i = 0; i < p.width; ++i) {
                auto nm = graph.name_map.find(p.name + "[" + std::to_string(i) + "]");
                if (nm != graph.name_map.end())
                    pi[nm->second] = ((it->second >> i) & 1) ? ~0ULL : 0;
            }
        }
        sim.step(pi);
        std::map<std::string, uint64_t> out;
        for (const auto& p : design.ports) {
            if (p.is_input) continue;
            uint64_t v = 0;
            for (int i = 0; i < p.width; ++i) {
                int id = graph.name_map.at("po:" + p.name + "[" + std::to_string(i) + "]");
                v |= (sim.value(id) & 1) << i;
            }
            out[p.name] = v;
        }
        trace.push_back(std::move(out));
    }
    return trace;
}

namespace {

// flat word-level evaluator for the equivalence checker's inner loop
struct CompiledWord {
    const WordDesign& design;
    std::map<std::string, int> net_index;
    std::vector<uint64_t> masks;
    std::vector<const WordNode*> order; // combinational, topological
    std::vector<const WordNode*> regs;
    std::vector<std::pair<int, int>> inputs; // (net index, width) per input port

    explicit CompiledWord(const WordDesign& d) : design(d) {
        auto idx = [&](const std::string& n) {
            auto it = net_index.find(n);
            if (it != net_index.end()) return it->second;
            int id = static_cast<int>(net_index.size());
            net_index[n] = id;
            int w = d.width_of(n);
            masks.push_back(w >= 64 ? ~0ULL : ((1ULL << w) - 1));
            return id;
        };
        for (const auto& p : d.ports)
            if (p.is_input) inputs.emplace_back(idx(p.name), p.width);
        std::map<std::string, const WordNode*> driver;
        for (const auto& nd : d.nodes) {
            idx(nd.output);
            for (const auto& in : nd.inputs) idx(in);
            if (!nd.enable.empty()) idx(nd.enable);
            if (nd.kind == WordKind::Reg)
                regs.push_back(&nd);
            else
                driver[nd.output] = &nd;
        }
        std::map<const WordNode*, bool> done;
        std::vector<std::pair<const WordNode*, bool>> stack;
        for (const auto& nd : d.nodes) {
            if (nd.kind == WordKind::Reg || done[&nd]) continue;
            stack.emplace_back(&nd, false);
            while (!stack.empty()) {
                auto [cur, expanded] = stack.back();
                stack.pop_back();
                if (done[cur]) continue;
                if (expanded) {
                    done[cur] = true;
                    order.push_back(cur);
                    continue;
                }
                stack.emplace_back(cur, true);
                for (const auto& in : cur->inputs) {
                    auto it = driver.find(in);
                    if (it != driver.end() && !done[it->second])
                        stack.emplace_back(it->second, false);
                }
            }
        }
    }

    void eval(std::vector<uint64_t>& v) const {
        for (const WordNode* nd : order) {
            auto in = [&](size_t i) { return v[net_index.at(nd->inputs[i])]; };
            const int out = net_index.at(nd->output);
            uint64_t r = 0;
            switch (nd->kind) {
            case WordKind::Const: r = nd->const_value; break;
            case WordKind::Not: r = ~in(0); break;
            case WordKind::And: r = in(0) & in(1); break;
            case WordKind::Or: r = in(0) | in(1); break;
            case WordKind::Xor: r = in(0) ^ in(1); break;
            case WordKind::Add: r = in(0) + in(1); break;
            case WordKind::Sub: r = in(0) - in(1); break;
            case WordKind::Mux: r = in(0) ? in(1) : in(2); break;
            case WordKind::Eq: r = in(0) == in(1); break;
            case WordKind::Lt: r = in(0) < in(1); break;
            case WordKind::Shl: r = in(0) << nd->shift_amount; break;
            case WordKind::Shr: r = in(0) >> nd->shift_amount; break;
            case WordKind::Concat: {
                int off = 0;
                for (size_t i = 0; i < nd->inputs.size(); ++i) {
                    r |= v[net_index.at(nd->inputs[i])] << off;
                    off += design.width_of(nd->inputs[i]);
                }
                break;
            }
            case WordKind::Slice: r = in(0) >> nd->slice_lo; break;
            case WordKind::RedOr: r = in(0) != 0; break;
            case WordKind::RedAnd: {
                int w = design.width_of(nd->inputs[0]);
                r = in(0) == (w >= 64 ? ~0ULL : ((1ULL << w) - 1));
                break;
            }
            case WordKind::RedXor: r = __builtin_popcountll(in(0)) & 1; break;
            case WordKind::Reg: break;
            }
            v[out] = r & masks[out];
        }
    }

    void clock(std::vector<uint64_t>& v) const {
        std::vector<uint64_t> next(regs.size());
        for (size_t i = 0; i < regs.size(); ++i) {
            const WordNode* nd = regs[i];
            bool en = nd->enable.empty() || v[net_index.at(nd->enable)] != 0;
            next[i] = en ? v[net_index.at(nd->inputs[0])] : v[net_index.at(nd->output)];
        }
        for (size_t i = 0; i < regs.size(); ++i) v[net_index.at(regs[i]->output)] = next[i];
    }
};

} // namespace

EquivalenceVerdict check_equivalence(const WordDesign& design, const SogGraph& graph,
                                     int64_t budget) {
    EquivalenceVerdict verdict;
    CompiledWord cw(design);

    int total_bits = 0;
    struct InBit { int pi_node; int port; int bit; };
    std::vector<InBit> in_bits;
    std::vector<const Port*> in_ports;
    for (const auto& p : design.ports)
        if (p.is_input) in_ports.push_back(&p);
    for (size_t pi = 0; pi < in_ports.size(); ++pi) {
        for (int bit = 0; bit < in_ports[pi]->width; ++bit) {
            auto it = graph.name_map.find(in_ports[pi]->name + "[" + std::to_string(bit) + "]");
            in_bits.push_back({it == graph.name_map.end() ? -1 : it->second,
                               static_cast<int>(pi), bit});
            ++total_bits;
        }
    }

    PackedSim ps(graph);

    auto make_stimulus = [&](const std::vector<std::vector<uint64_t>>& cycles) {
        WordStimulus s;
        for (const auto& c : cycles) {
            std::map<std::string, uint64_t> m;
            for (size_t pi = 0; pi < in_ports.size(); ++pi) m[in_ports[pi]->name] = c[pi];
            s.push_back(std::move(m));
        }
        return s;
    };

    auto run_block = [&](const std::vector<std::vector<std::vector<uint64_t>>>& lane_cycles,
                         int n_lanes) -> bool {
        // lane_cycles[lane][cycle][port] = word value
        const int n_cycles = static_cast<int>(lane_cycles[0].size());
        // packed inputs
        ps.reset();
        std::vector<uint64_t> word_vals(cw.net_index.size(), 0);

        // word-side: simulate every lane, record output bits per cycle
        std::vector<std::vector<std::vector<uint64_t>>> word_out(
            n_lanes, std::vector<std::vector<uint64_t>>(n_cycles));
        std::vector<const Port*> out_ports;
        for (const auto& p : design.ports)
            if (!p.is_input) out_ports.push_back(&p);
        for (int lane = 0; lane < n_lanes; ++lane) {
            std::fill(word_vals.begin(), word_vals.end(), 0);
            for (int cyc = 0; cyc < n_cycles; ++cyc) {
                for (size_t pi = 0; pi < in_ports.size(); ++pi)
                    word_vals[cw.inputs[pi].first] = lane_cycles[lane][cyc][pi];
                cw.eval(word_vals);
                for (const Port* op : out_ports)
                    word_out[lane][cyc].push_back(word_vals[cw.net_index.at(op->name)]);
                cw.clock(word_vals);
            }
        }

        // packed SOG side
        for (int cyc = 0; cyc < n_cycles; ++cyc) {
            std::map<int, uint64_t> pi_words;
            for (const auto& ib : in_bits) {
                if (ib.pi_node < 0) continue;
                uint64_t w = 0;
                for (int lane = 0; lane < n_lanes; ++lane)
                    w |= ((lane_cycles[lane][cyc][ib.port] >> ib.bit) & 1ULL)
                         << lane;
                pi_words[ib.pi_node] = w;
            }
            ps.step(pi_words);
            for (size_t op = 0; op < out_ports.size(); ++op) {
                for (int bit = 0; bit < out_ports[op]->width; ++bit) {
                    int id = graph.name_map.at("po:" + out_ports[op]->name + "[" +
                                               std::to_string(bit) + "]");
                    uint64_t got = ps.value(id);
                    for (int lane = 0; lane < n_lanes; ++lane) {
                        uint64_t want = (word_out[lane][cyc][op] >> bit) & 1;
                        if (((got >> lane) & 1) != want) {
                            verdict.equivalent = false;
                            std::vector<std::vector<uint64_t>> cycles(
                                lane_cycles[lane].begin(),
                                lane_cycles[lane].begin() + cyc + 1);
                            verdict.counterexample = make_stimulus(cycles);
                            return false;
                        }
                    }
                }
            }
        }
        verdict.patterns_checked += n_lanes;
        return true;
    };

    if (total_bits <= 16) {
        verdict.exhaustive = true;
        const int64_t n_patterns = 1LL << total_bits;
        for (int64_t base = 0; base < n_patterns; base += 64) {
            const int n_lanes = static_cast<int>(std::min<int64_t>(64, n_patterns - base));
            std::vector<std::vector<std::vector<uint64_t>>> lanes(n_lanes);
            for (int lane = 0; lane < n_lanes; ++lane) {
                const int64_t pattern = base + lane;
                std::vector<uint64_t> ports(in_ports.size(), 0);
                for (size_t bi = 0; bi < in_bits.size(); ++bi)
                    if ((pattern >> bi) & 1)
                        ports[in_bits[bi].port] |= 1ULL << in_bits[bi].bit;
                lanes[lane] = {ports, ports}; // held for two cycles
            }
            if (!run_block(lanes, n_lanes)) return verdict;
        }
        return verdict;
    }

    // randomized path: multi-cycle sequences, 64 lanes per block
    Rng rng(derive_seed(0xEC41u, std::hash<std::string>{}(design.name)));
    const int n_cycles = 4;
    int64_t done = 0;
    while (done < budget) {
        const int n_lanes = 64;
        std::vector<std::vector<std::vector<uint64_t>>> lanes(n_lanes);
        for (int lane = 0; lane < n_lanes; ++lane) {
            lanes[lane].resize(n_cycles);
            for (int cyc = 0; cyc < n_cycles; ++cyc) {
                std::vector<uint64_t> ports(in_ports.size());
                for (size_t pi = 0; pi < in_ports.size(); ++pi) {
                    int w = in_ports[pi]->width;
                    ports[pi] = rng.next() & (w >= 64 ? ~0ULL : ((1ULL << w) - 1));
                }
                lanes[lane][cyc] = std::move(ports);
            }
        }
        if (!run_block(lanes, n_lanes)) return verdict;
        done += n_lanes;
    }
    return verdict;
}

DesignFeatures sog_features(const SogGraph& graph) {
    DesignFeatures f;
    for (const auto& nd : graph.nodes) ++f.kind_counts[static_cast<int>(nd.kind)];
    f.n_registers = f.kind_counts[static_cast<int>(SogKind::Dff)];
    f.n_pi = f.kind_counts[static_cast<int>(SogKind::PI)];
    f.n_po = f.kind_counts[static_cast<int>(SogKind::PO)];
    auto lvl = graph.levels();
    for (int l : lvl) f.combinational_depth = std::max<int64_t>(f.combinational_depth, l);
    for (const auto& fo : graph.fanouts()) f.total_fanout += fo.size();
    f.mean_fanout =
        graph.nodes.empty() ? 0.0 : static_cast<double>(f.total_fanout) / graph.nodes.size();
    return f;
}

std::string print_sog(const SogGraph& graph, const std::vector<double>* p,
                      const std::vector<double>* alpha) {
    json doc;
    doc["name"] = graph.name;
    doc["clock_period_ns"] = graph.clock_period_ns;
    doc["nodes"] = json::array();
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        const auto& nd = graph.nodes[i];
        json jn{{"id", i}, {"kind", sog_kind_name(nd.kind)}, {"fanin", nd.fanin}};
        if (!nd.identity.empty()) jn["identity"] = nd.identity;
        if (p) jn["p"] = (*p)[i];
        if (alpha) jn["alpha"] = (*alpha)[i];
        doc["nodes"].push_back(std::move(jn));
    }
    return doc.dump(2) + "\n";
}

} // namespace sogppa
