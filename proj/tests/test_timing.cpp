#include <doctest.h>

#include <cmath>
#include <functional>

#include "helpers.hpp"
#include "sogppa/rng.hpp"
#include "sogppa/timing.hpp"

using namespace sogppa;

namespace {

// random gate-level DAG plus hand-assigned delays; no library involved, so
// the exhaustive oracle below is fully independent of annotate()
struct SyntheticTiming {
    SogGraph graph;
    AnnotatedGraph ann;
};

SyntheticTiming random_dag(uint64_t seed, int n_gates) {
    Rng rng(seed);
    SyntheticTiming st;
    SogGraph& g = st.graph;
    g.clock_period_ns = 1.0;

    const int n_pi = static_cast<int>(rng.range(2, 4));
    for (int i = 0; i < n_pi; ++i) {
        g.nodes.push_back({SogKind::PI, {}, "pi" + std::to_string(i) + "[0]"});
        g.name_map[g.nodes.back().identity] = static_cast<int>(g.nodes.size()) - 1;
    }
    for (int i = 0; i < n_gates; ++i) {
        const int hi = static_cast<int>(g.nodes.size()) - 1;
        SogNode n;
        const int pickk = static_cast<int>(rng.below(3));
        n.kind = pickk == 0 ? SogKind::Not : (pickk == 1 ? SogKind::And2 : SogKind::Or2);
        const int arity = n.kind == SogKind::Not ? 1 : 2;
        for (int a = 0; a < arity; ++a)
            n.fanin.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(hi + 1))));
        g.nodes.push_back(std::move(n));
    }
    // a PO on the last node and on one random mid node
    const int last = static_cast<int>(g.nodes.size()) - 1;
    g.nodes.push_back({SogKind::PO, {last}, "po:out[0]"});
    g.outputs.push_back(static_cast<int>(g.nodes.size()) - 1);
    const int mid = static_cast<int>(rng.below(static_cast<uint64_t>(last + 1)));
    g.nodes.push_back({SogKind::PO, {mid}, "po:tap[0]"});
    g.outputs.push_back(static_cast<int>(g.nodes.size()) - 1);

    st.ann.graph = &g;
    st.ann.setup_ns = 0.04;
    st.ann.clk_to_q_ns = 0.05;
    st.ann.delay_ns.assign(g.nodes.size(), 0.0);
    st.ann.slew_ns.assign(g.nodes.size(), 0.02);
    st.ann.load_fF.assign(g.nodes.size(), 0.0);
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        const SogKind k = g.nodes[i].kind;
        if (k != SogKind::PI && k != SogKind::PO)
            st.ann.delay_ns[i] = 0.01 + 0.2 * rng.real();
    }
    return st;
}

// exhaustive max-delay-to-node by depth-first path enumeration (exponential;
// keep the graphs small)
double enumerate_arrival(const SyntheticTiming& st, int node) {
    const auto& g = st.graph;
    std::function<double(int)> walk = [&](int v) -> double {
        const auto& nd = g.nodes[v];
        if (nd.fanin.empty()) return 0.0;
        double best = 0.0;
        for (int f : nd.fanin) best = std::max(best, walk(f));
        return best + st.ann.delay_ns[v];
    };
    return walk(node);
}

} // namespace

TEST_CASE("arrivals equal exhaustive path enumeration on random DAGs") {
    for (uint64_t seed = 1; seed <= 10; ++seed) {
        const SyntheticTiming st = random_dag(seed, 60);
        const TimingResult r = sta(st.ann, 1.0);
        for (const auto& e : r.endpoints) {
            const double oracle = enumerate_arrival(st, e.node);
            CHECK(std::abs(e.arrival_ns - oracle) < 1e-9);
        }
    }
}

TEST_CASE("chain slack arithmetic") {
    // PI -> NOT (0.10) -> AND2 (0.20) -> DFF, setup 0.05, T = 1.0 -> slack 0.65
    SogGraph g;
    g.clock_period_ns = 1.0;
    g.nodes.push_back({SogKind::PI, {}, "a[0]"});
    g.nodes.push_back({SogKind::Not, {0}, ""});
    g.nodes.push_back({SogKind::And2, {1, 1}, ""});
    g.nodes.push_back({SogKind::Dff, {2}, "q[0]"});
    g.registers.push_back(3);
    AnnotatedGraph ann;
    ann.graph = &g;
    ann.delay_ns = {0.0, 0.10, 0.20, 0.05};
    ann.slew_ns.assign(4, 0.02);
    ann.load_fF.assign(4, 0.0);
    ann.setup_ns = 0.05;
    ann.clk_to_q_ns = 0.05;

    const TimingResult r = sta(ann, 1.0);
    REQUIRE(r.endpoints.size() == 1);
    CHECK(r.endpoints[0].slack_ns == doctest::Approx(0.65));
    CHECK(r.wns_r == doctest::Approx(0.65));
    CHECK(r.tns_r == 0.0);

    // raising the clock period shifts every slack by exactly delta
    const TimingResult r2 = sta(ann, 1.7);
    CHECK(r2.endpoints[0].slack_ns == doctest::Approx(0.65 + 0.7));

    // the single worst path covers the whole chain and its accumulated
    // delay equals the endpoint arrival
    const auto paths = worst_paths(r, ann);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].source_identity == "a[0]");
    CHECK(paths[0].sink_identity == "q[0]");
    const auto pf = path_features(paths[0], ann);
    CHECK(pf.accumulated_delay_ns == doctest::Approx(r.endpoints[0].arrival_ns));
    CHECK(pf.n_ops == 2);
    CHECK(pf.n_not == 1);
    CHECK(pf.n_and == 1);
    CHECK(pf.endpoint_is_register);
}

TEST_CASE("wns and tns follow their definitions") {
    // three parallel chains with delays chosen to give slacks {-0.2, 0.1, -0.5}
    SogGraph g;
    g.clock_period_ns = 1.0;
    AnnotatedGraph ann;
    std::vector<double> delays = {1.2, 0.9, 1.5}; // T = 1.0 -> slacks -0.2, 0.1, -0.5
    for (int c = 0; c < 3; ++c) {
        const int pi = static_cast<int>(g.nodes.size());
        g.nodes.push_back({SogKind::PI, {}, "i" + std::to_string(c) + "[0]"});
        g.nodes.push_back({SogKind::Not, {pi}, ""});
        g.nodes.push_back({SogKind::PO, {pi + 1}, "po:o" + std::to_string(c) + "[0]"});
        g.outputs.push_back(pi + 2);
    }
    ann.graph = &g;
    ann.delay_ns.assign(g.nodes.size(), 0.0);
    ann.slew_ns.assign(g.nodes.size(), 0.02);
    ann.load_fF.assign(g.nodes.size(), 0.0);
    for (int c = 0; c < 3; ++c) ann.delay_ns[3 * c + 1] = delays[c];

    const TimingResult r = sta(ann, 1.0);
    CHECK(r.wns_r == doctest::Approx(-0.5));
    CHECK(r.tns_r == doctest::Approx(-0.7));
    // ordering: worst slack first
    const auto paths = worst_paths(r, ann);
    CHECK(paths[0].sink_identity == "po:o2[0]");
    CHECK(paths[1].sink_identity == "po:o0[0]");
    CHECK(paths[2].sink_identity == "po:o1[0]");
}

TEST_CASE("diamond tie breaks to the lowest node id") {
    SogGraph g;
    g.nodes.push_back({SogKind::PI, {}, "a[0]"});
    g.nodes.push_back({SogKind::Not, {0}, ""}); // id 1
    g.nodes.push_back({SogKind::Not, {0}, ""}); // id 2, same delay
    g.nodes.push_back({SogKind::And2, {1, 2}, ""});
    g.nodes.push_back({SogKind::PO, {3}, "po:y[0]"});
    g.outputs.push_back(4);
    AnnotatedGraph ann;
    ann.graph = &g;
    ann.delay_ns = {0.0, 0.1, 0.1, 0.1, 0.0};
    ann.slew_ns.assign(5, 0.02);
    ann.load_fF.assign(5, 0.0);

    const auto paths = worst_paths(sta(ann, 1.0), ann);
    REQUIRE(paths.size() == 1);
    REQUIRE(paths[0].nodes.size() == 4);
    CHECK(paths[0].nodes[1] == 1); // not 2
}

TEST_CASE("worst-K selection rule") {
    // 40 endpoints, fraction 0.01 -> ceil(0.4) = 1 but the floor of 16 wins
    SogGraph g;
    AnnotatedGraph ann;
    for (int c = 0; c < 40; ++c) {
        const int pi = static_cast<int>(g.nodes.size());
        g.nodes.push_back({SogKind::PI, {}, "i" + std::to_string(c) + "[0]"});
        g.nodes.push_back({SogKind::PO, {pi}, "po:o" + std::to_string(c) + "[0]"});
        g.outputs.push_back(pi + 1);
    }
    ann.graph = &g;
    ann.delay_ns.assign(g.nodes.size(), 0.0);
    ann.slew_ns.assign(g.nodes.size(), 0.02);
    ann.load_fF.assign(g.nodes.size(), 0.0);
    const TimingResult r = sta(ann, 1.0);
    CHECK(worst_paths(r, ann).size() == 16);
    CHECK(worst_paths(r, ann, 1.0).size() == 40);
    CHECK(worst_paths(r, ann, 0.5).size() == 20);
}

TEST_CASE("annotate computes loads from the fixture library") {
    const Library lib = test_helpers::load_techlib();
    // one NOT driving three AND2 gates: load = 3 pin caps + 3 wire caps = 6 fF
    SogGraph g;
    g.nodes.push_back({SogKind::PI, {}, "a[0]"});
    g.nodes.push_back({SogKind::Not, {0}, ""});
    for (int i = 0; i < 3; ++i) g.nodes.push_back({SogKind::And2, {1, 0}, ""});
    g.nodes.push_back({SogKind::PO, {2}, "po:y[0]"});
    g.outputs.push_back(5);
    const AnnotatedGraph ann = annotate(g, lib, TimingConfig{});
    CHECK(ann.load_fF[1] == doctest::Approx(6.0));
    // the AND2 feeding the PO: po_load 2.0 + wire 1.0 = 3.0
    CHECK(ann.load_fF[2] == doctest::Approx(3.0));
    CHECK(ann.setup_ns == doctest::Approx(0.04));
    CHECK(ann.clk_to_q_ns == doctest::Approx(0.05));
    // scalar fixture tables: INV delay is 0.05 regardless of load
    CHECK(ann.delay_ns[1] == doctest::Approx(0.05));
}

TEST_CASE("wire cap increases never reduce delays") {
    const Library lib = test_helpers::load_techlib();
    const SogGraph g = lower(test_helpers::generated(11, 2, 4, 6));
    TimingConfig a, b;
    b.wire_cap_per_fanout_fF = 4.0;
    const AnnotatedGraph low = annotate(g, lib, a);
    const AnnotatedGraph high = annotate(g, lib, b);
    for (size_t i = 0; i < g.nodes.size(); ++i) CHECK(high.delay_ns[i] >= low.delay_ns[i]);
}

TEST_CASE("timing report document lists endpoints and paths") {
    const Library lib = test_helpers::load_techlib();
    const WordDesign d = test_helpers::small_alu();
    const SogGraph g = lower(d);
    const AnnotatedGraph ann = annotate(g, lib, TimingConfig{});
    const TimingResult r = sta(ann, d.clock_period_ns);
    const auto paths = worst_paths(r, ann);
    const std::string doc = print_timing_report(r, paths, ann);
    CHECK(doc.find("\"wns_r\"") != std::string::npos);
    CHECK(doc.find("\"worst_paths\"") != std::string::npos);
    CHECK(doc.find("y[0]") != std::string::npos);
}
