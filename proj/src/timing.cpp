#include "sogppa/timing.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace sogppa {

using json = nlohmann::ordered_json;

const std::string& TimingConfig::cell_for(SogKind k) const {
    auto it = cell_binding.find(k);
    if (it == cell_binding.end())
        throw LibertyError(std::string("no cell bound for kind ") + sog_kind_name(k));
    return it->second;
}

namespace {

bool is_gate(SogKind k) {
    return k == SogKind::Not || k == SogKind::And2 || k == SogKind::Or2 ||
           k == SogKind::Xor2 || k == SogKind::Mux2;
}

// input pin name by fanin position for the bound cells
const char* pin_for_position(SogKind k, size_t pos) {
    if (k == SogKind::Mux2) return pos == 0 ? "S" : (pos == 1 ? "A" : "B");
    if (k == SogKind::Dff) return "D";
    return pos == 0 ? "A" : "B";
}

} // namespace

AnnotatedGraph annotate(const SogGraph& graph, const Library& lib, const TimingConfig& cfg) {
    AnnotatedGraph ag;
    ag.graph = &graph;
    const size_t n = graph.nodes.size();
    ag.delay_ns.assign(n, 0.0);
    ag.slew_ns.assign(n, cfg.default_input_slew_ns);
    ag.load_fF.assign(n, 0.0);

    {
        const Cell& dff = lib.cell(cfg.cell_for(SogKind::Dff));
        ag.setup_ns = dff.setup_ns.value_or(cfg.default_setup_ns);
        ag.clk_to_q_ns = dff.clk_to_q_ns.value_or(cfg.default_clk_to_q_ns);
    }

    // load per node: fanout pin caps + wire cap per fanout + po load per PO
    auto fo = graph.fanouts();
    for (size_t i = 0; i < n; ++i) {
        double load = 0;
        for (int f : fo[i]) {
            const auto& fn = graph.nodes[f];
            if (fn.kind == SogKind::PO) {
                load += cfg.po_load_fF;
            } else if (is_gate(fn.kind) || fn.kind == SogKind::Dff) {
                size_t pos = 0;
                while (fn.fanin[pos] != static_cast<int>(i)) ++pos;
                load += lib.input_cap(cfg.cell_for(fn.kind), pin_for_position(fn.kind, pos));
            }
        }
        load += cfg.wire_cap_per_fanout_fF * static_cast<double>(fo[i].size());
        ag.load_fF[i] = load;
    }

    // delays and slews in topological (id) order; DFF q launches at clk_to_q
    for (size_t i = 0; i < n; ++i) {
        const auto& nd = graph.nodes[i];
        if (nd.kind == SogKind::Dff) {
            ag.delay_ns[i] = ag.clk_to_q_ns;
            ag.slew_ns[i] = cfg.default_input_slew_ns;
        } else if (is_gate(nd.kind)) {
            double worst_slew = 0;
            for (int f : nd.fanin)
                worst_slew = std::max(worst_slew, graph.nodes[f].kind == SogKind::Dff
                                                      ? cfg.default_input_slew_ns
                                                      : ag.slew_ns[f]);
            auto [d, s] = lib.delay_of(cfg.cell_for(nd.kind), worst_slew, ag.load_fF[i]);
            ag.delay_ns[i] = d;
            ag.slew_ns[i] = s;
        } else if (nd.kind == SogKind::PO) {
            ag.slew_ns[i] = ag.slew_ns[nd.fanin[0]];
        }
    }
    return ag;
}

TimingResult sta(const AnnotatedGraph& ag, double clock_period_ns) {
    const SogGraph& g = *ag.graph;
    const size_t n = g.nodes.size();
    TimingResult r;
    r.arrival_ns.assign(n, 0.0);

    for (size_t i = 0; i < n; ++i) {
        const auto& nd = g.nodes[i];
        switch (nd.kind) {
        case SogKind::PI:
        case SogKind::Const0:
        case SogKind::Const1: r.arrival_ns[i] = 0; break;
        case SogKind::Dff: r.arrival_ns[i] = ag.clk_to_q_ns; break;
        case SogKind::PO: r.arrival_ns[i] = r.arrival_ns[nd.fanin[0]]; break;
        default: {
            double m = 0;
            for (int f : nd.fanin) {
                double a = g.nodes[f].kind == SogKind::Dff ? ag.clk_to_q_ns
                                                           : r.arrival_ns[f];
                m = std::max(m, a);
            }
            r.arrival_ns[i] = m + ag.delay_ns[i];
            break;
        }
        }
    }

    for (size_t i = 0; i < n; ++i) {
        const auto& nd = g.nodes[i];
        if (nd.kind == SogKind::PO) {
            Endpoint e;
            e.node = static_cast<int>(i);
            e.is_register = false;
            e.identity = nd.identity;
            e.arrival_ns = r.arrival_ns[i];
            e.slack_ns = clock_period_ns - e.arrival_ns;
            r.endpoints.push_back(std::move(e));
        } else if (nd.kind == SogKind::Dff) {
            int d = nd.fanin[0];
            Endpoint e;
            e.node = static_cast<int>(i);
            e.is_register = true;
            e.identity = nd.identity;
            e.arrival_ns = g.nodes[d].kind == SogKind::Dff ? ag.clk_to_q_ns : r.arrival_ns[d];
            e.slack_ns = clock_period_ns - e.arrival_ns - ag.setup_ns;
            r.endpoints.push_back(std::move(e));
        }
    }

    r.wns_r = 0;
    r.tns_r = 0;
    bool first = true;
    for (const auto& e : r.endpoints) {
        if (first || e.slack_ns < r.wns_r) r.wns_r = e.slack_ns;
        first = false;
        r.tns_r += std::min(0.0, e.slack_ns);
    }
    return r;
}

std::vector<Path> worst_paths(const TimingResult& result, const AnnotatedGraph& ag,
                              double fraction) {
    const SogGraph& g = *ag.graph;
    auto fo = g.fanouts();
    std::vector<Path> paths;
    for (const auto& e : result.endpoints) {
        Path p;
        p.sink_identity = e.identity;
        p.slack_ns = e.slack_ns;
        p.analytical_delay_ns = e.arrival_ns;
        p.endpoint_is_register = e.is_register;
        std::vector<int> rev{e.node};
        int cur = g.nodes[e.node].fanin[0];
        while (true) {
            rev.push_back(cur);
            const auto& nd = g.nodes[cur];
            if (!is_gate(nd.kind)) break;
            int best = -1;
            double best_arr = -1;
            for (int f : nd.fanin) {
                double a = g.nodes[f].kind == SogKind::Dff ? ag.clk_to_q_ns
                                                           : result.arrival_ns[f];
                if (best < 0 || a > best_arr) {
                    best = f;
                    best_arr = a;
                } else if (a == best_arr && f < best) {
                    best = f;
                }
            }
            cur = best;
        }
        std::reverse(rev.begin(), rev.end());
        p.nodes = std::move(rev);
        const auto& launch = g.nodes[p.nodes.front()];
        p.source_identity = launch.identity.empty() ? sog_kind_name(launch.kind)
                                                    : launch.identity;
        paths.push_back(std::move(p));
    }

    std::stable_sort(paths.begin(), paths.end(), [](const Path& a, const Path& b) {
        if (a.slack_ns != b.slack_ns) return a.slack_ns < b.slack_ns;
        return a.sink_identity < b.sink_identity;
    });
    const auto n = static_cast<int64_t>(paths.size());
    int64_t k = std::max<int64_t>(16, static_cast<int64_t>(
                                          std::ceil(fraction * static_cast<double>(n))));
    k = std::min(k, n);
    paths.resize(static_cast<size_t>(k));
    return paths;
}

std::vector<double> PathFeatureVector::as_row() const {
    return {static_cast<double>(n_ops),  static_cast<double>(n_not),
            static_cast<double>(n_and),  static_cast<double>(n_or),
            static_cast<double>(n_xor),  static_cast<double>(n_mux),
            accumulated_delay_ns,        static_cast<double>(max_fanout),
            endpoint_is_register ? 1.0 : 0.0};
}

PathFeatureVector path_features(const Path& path, const AnnotatedGraph& ag) {
    const SogGraph& g = *ag.graph;
    auto fo = g.fanouts();
    PathFeatureVector f;
    f.endpoint_is_register = path.endpoint_is_register;
    for (size_t i = 0; i < path.nodes.size(); ++i) {
        const int n = path.nodes[i];
        // the endpoint register captures; its clk-to-q belongs to the next cycle
        if (i + 1 == path.nodes.size() && g.nodes[n].kind == SogKind::Dff) continue;
        switch (g.nodes[n].kind) {
        case SogKind::Not: ++f.n_not; break;
        case SogKind::And2: ++f.n_and; break;
        case SogKind::Or2: ++f.n_or; break;
        case SogKind::Xor2: ++f.n_xor; break;
        case SogKind::Mux2: ++f.n_mux; break;
        default: break;
        }
        f.accumulated_delay_ns += ag.delay_ns[n];
        f.max_fanout = std::max<int64_t>(f.max_fanout, fo[n].size());
    }
    f.n_ops = f.n_not + f.n_and + f.n_or + f.n_xor + f.n_mux;
    return f;
}

std::string print_timing_report(const TimingResult& result, const std::vector<Path>& paths,
                                const AnnotatedGraph& ag) {
    json doc;
    doc["wns_r"] = result.wns_r;
    doc["tns_r"] = result.tns_r;
    doc["endpoints"] = json::array();
    for (const auto& e : result.endpoints)
        doc["endpoints"].push_back({{"identity", e.identity}, {"slack", e.slack_ns}});
    doc["worst_paths"] = json::array();
    for (const auto& p : paths) {
        auto f = path_features(p, ag);
        doc["worst_paths"].push_back({{"source", p.source_identity},
                                      {"sink", p.sink_identity},
                                      {"delay", p.analytical_delay_ns},
                                      {"n_ops", f.n_ops}});
    }
    return doc.dump(2) + "\n";
}

} // namespace sogppa
