#include "sogppa/golden.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "sogppa/activity.hpp"

namespace sogppa {

namespace {

// rebuild-style optimizer: walks the input in topological order and emits a
// new graph through folding smart constructors plus a structural hash table
struct Rebuilder {
    SogGraph out;
    std::map<std::tuple<SogKind, int, int, int>, int> hash;
    int const0 = -1, const1 = -1;

    int raw(SogKind k, std::vector<int> fanin, std::string identity = {}) {
        const int id = static_cast<int>(out.nodes.size());
        out.nodes.push_back({k, std::move(fanin), std::move(identity)});
        return id;
    }

    bool is0(int id) const { return out.nodes[id].kind == SogKind::Const0; }
    bool is1(int id) const { return out.nodes[id].kind == SogKind::Const1; }

    int get_const(bool v) {
        int& slot = v ? const1 : const0;
        if (slot < 0) slot = raw(v ? SogKind::Const1 : SogKind::Const0, {});
        return slot;
    }

    int hashed(SogKind k, int a, int b = -1, int c = -1) {
        const auto key = std::make_tuple(k, a, b, c);
        auto it = hash.find(key);
        if (it != hash.end()) return it->second;
        std::vector<int> fanin{a};
        if (b >= 0) fanin.push_back(b);
        if (c >= 0) fanin.push_back(c);
        const int id = raw(k, std::move(fanin));
        hash.emplace(key, id);
        return id;
    }

    int mk_not(int a) {
        if (is0(a)) return get_const(true);
        if (is1(a)) return get_const(false);
        if (out.nodes[a].kind == SogKind::Not) return out.nodes[a].fanin[0];
        return hashed(SogKind::Not, a);
    }

    int mk_and(int a, int b) {
        if (is0(a) || is0(b)) return get_const(false);
        if (is1(a)) return b;
        if (is1(b)) return a;
        if (a == b) return a;
        if (a > b) std::swap(a, b);
        return hashed(SogKind::And2, a, b);
    }

    int mk_or(int a, int b) {
        if (is1(a) || is1(b)) return get_const(true);
        if (is0(a)) return b;
        if (is0(b)) return a;
        if (a == b) return a;
        if (a > b) std::swap(a, b);
        return hashed(SogKind::Or2, a, b);
    }

    int mk_xor(int a, int b) {
        if (is0(a)) return b;
        if (is0(b)) return a;
        if (is1(a)) return mk_not(b);
        if (is1(b)) return mk_not(a);
        if (a > b) std::swap(a, b);
        return hashed(SogKind::Xor2, a, b);
    }

    int mk_mux(int s, int t, int e) {
        if (is1(s)) return t;
        if (is0(s)) return e;
        if (t == e) return t;
        return hashed(SogKind::Mux2, s, t, e);
    }
};

} // namespace

SogGraph optimize(const SogGraph& g) {
    Rebuilder rb;
    rb.out.name = g.name;
    rb.out.clock_period_ns = g.clock_period_ns;

    const int n = static_cast<int>(g.nodes.size());
    std::vector<int> remap(n, -1);

    // interface and state nodes survive verbatim, in input order
    for (int i = 0; i < n; ++i)
        if (g.nodes[i].kind == SogKind::PI)
            remap[i] = rb.raw(SogKind::PI, {}, g.nodes[i].identity);
    for (int old_id : g.registers)
        remap[old_id] = rb.raw(SogKind::Dff, {-1}, g.nodes[old_id].identity);

    // ascending ids form a combinational topological order (DFF q is a leaf)
    for (int i = 0; i < n; ++i) {
        if (remap[i] >= 0) continue;
        const SogNode& nd = g.nodes[i];
        switch (nd.kind) {
            case SogKind::Const0: remap[i] = rb.get_const(false); break;
            case SogKind::Const1: remap[i] = rb.get_const(true); break;
            case SogKind::Not: remap[i] = rb.mk_not(remap[nd.fanin[0]]); break;
            case SogKind::And2:
                remap[i] = rb.mk_and(remap[nd.fanin[0]], remap[nd.fanin[1]]);
                break;
            case SogKind::Or2:
                remap[i] = rb.mk_or(remap[nd.fanin[0]], remap[nd.fanin[1]]);
                break;
            case SogKind::Xor2:
                remap[i] = rb.mk_xor(remap[nd.fanin[0]], remap[nd.fanin[1]]);
                break;
            case SogKind::Mux2:
                remap[i] = rb.mk_mux(remap[nd.fanin[0]], remap[nd.fanin[1]],
                                     remap[nd.fanin[2]]);
                break;
            case SogKind::PO:
                break; // handled after gates
            default:
                break;
        }
    }
    for (int old_id : g.registers) {
        rb.out.nodes[remap[old_id]].fanin[0] = remap[g.nodes[old_id].fanin[0]];
        rb.out.registers.push_back(remap[old_id]);
    }
    for (int old_id : g.outputs) {
        const int driver = remap[g.nodes[old_id].fanin[0]];
        remap[old_id] = rb.raw(SogKind::PO, {driver}, g.nodes[old_id].identity);
        rb.out.outputs.push_back(remap[old_id]);
    }

    // drop gates and constants outside the PO / DFF-d cones
    SogGraph& built = rb.out;
    const int m = static_cast<int>(built.nodes.size());
    std::vector<char> keep(m, 0);
    std::vector<int> stack;
    for (int i = 0; i < m; ++i) {
        const SogKind k = built.nodes[i].kind;
        if (k == SogKind::PI || k == SogKind::PO || k == SogKind::Dff) {
            keep[i] = 1;
            for (int f : built.nodes[i].fanin) stack.push_back(f);
        }
    }
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        if (keep[v]) continue;
        keep[v] = 1;
        if (built.nodes[v].kind != SogKind::Dff)
            for (int f : built.nodes[v].fanin) stack.push_back(f);
    }

    SogGraph pruned;
    pruned.name = built.name;
    pruned.clock_period_ns = built.clock_period_ns;
    std::vector<int> final_id(m, -1);
    for (int i = 0; i < m; ++i) {
        if (!keep[i]) continue;
        final_id[i] = static_cast<int>(pruned.nodes.size());
        pruned.nodes.push_back(built.nodes[i]);
    }
    for (auto& nd : pruned.nodes)
        for (int& f : nd.fanin) f = final_id[f];
    for (int id : built.outputs) pruned.outputs.push_back(final_id[id]);
    for (int id : built.registers) pruned.registers.push_back(final_id[id]);
    for (int i = 0; i < static_cast<int>(pruned.nodes.size()); ++i)
        if (!pruned.nodes[i].identity.empty()) pruned.name_map[pruned.nodes[i].identity] = i;

    pruned.check();
    return pruned;
}

MappedGraph map_cells(const SogGraph& graph, const Library& lib, const TimingConfig& cfg) {
    MappedGraph mapped;
    mapped.graph = &graph;
    mapped.cell.resize(graph.nodes.size());
    for (size_t i = 0; i < graph.nodes.size(); ++i) {
        const SogKind k = graph.nodes[i].kind;
        if (k == SogKind::PI || k == SogKind::PO || k == SogKind::Const0 ||
            k == SogKind::Const1)
            continue;
        auto it = cfg.cell_binding.find(k);
        if (it == cfg.cell_binding.end())
            throw GoldenError(std::string("no cell bound for kind ") + sog_kind_name(k));
        const Cell& cell = lib.cell(it->second); // throws on unknown cell
        mapped.cell[i] = cell.name;
        if (k == SogKind::Dff)
            mapped.area_seq += cell.area;
        else
            mapped.area_comb += cell.area;
    }
    return mapped;
}

GoldenLabels golden_label(const WordDesign& design, const Library& lib,
                          const PowerConfig& power_cfg, const TimingConfig& timing_cfg) {
    const SogGraph raw = lower(design);
    const SogGraph opt = optimize(raw);

    GoldenLabels labels;
    labels.nodes_before = static_cast<int64_t>(raw.nodes.size());
    labels.nodes_after = static_cast<int64_t>(opt.nodes.size());

    const MappedGraph mapped = map_cells(opt, lib, timing_cfg);
    labels.area_comb = mapped.area_comb;
    labels.area_seq = mapped.area_seq;

    const AnnotatedGraph ann = annotate(opt, lib, timing_cfg);
    const TimingResult timing = sta(ann, opt.clock_period_ns);
    labels.wns_ns = timing.wns_r;
    labels.tns_ns = timing.tns_r;
    for (const Path& p : worst_paths(timing, ann, 1.0))
        labels.path_delay_ns[{p.source_identity, p.sink_identity}] = p.analytical_delay_ns;

    const ActivityMap activity =
        simulate_activity(opt, power_cfg.mc_cycles, power_cfg.seed);
    const double freq_GHz = 1.0 / opt.clock_period_ns;
    const double vdd_sq = power_cfg.vdd_V * power_cfg.vdd_V;
    double dynamic_fJ_per_cycle = 0, leakage_uW = 0;
    for (size_t i = 0; i < opt.nodes.size(); ++i) {
        if (mapped.cell[i].empty()) continue;
        dynamic_fJ_per_cycle +=
            activity.alpha[i] *
            (lib.internal_energy(mapped.cell[i]) + 0.5 * ann.load_fF[i] * vdd_sq);
        leakage_uW += lib.attr(mapped.cell[i], "leakage");
    }
    labels.power_uW = freq_GHz * dynamic_fJ_per_cycle + leakage_uW; // fJ/ns = µW
    return labels;
}

} // namespace sogppa
