#include <doctest.h>

#include <cmath>
#include <functional>

#include "helpers.hpp"
#include "sogppa/activity.hpp"
#include "sogppa/rng.hpp"

using namespace sogppa;

namespace {

// build a random combinational tree cone: every gate's fanins are fresh
// subtrees, so the spatial-independence model is exact and the probabilities
// can be checked against exhaustive input enumeration
struct Cone {
    SogGraph graph;
    std::vector<int> inputs; // PI node ids
};

int build_tree(Cone& c, Rng& rng, int depth) {
    if (depth == 0 || (depth < 3 && rng.below(3) == 0)) {
        const int id = static_cast<int>(c.graph.nodes.size());
        c.graph.nodes.push_back(
            {SogKind::PI, {}, "i" + std::to_string(c.inputs.size()) + "[0]"});
        c.inputs.push_back(id);
        return id;
    }
    const int pick = static_cast<int>(rng.below(5));
    SogNode n;
    switch (pick) {
    case 0: n.kind = SogKind::Not; break;
    case 1: n.kind = SogKind::And2; break;
    case 2: n.kind = SogKind::Or2; break;
    case 3: n.kind = SogKind::Xor2; break;
    default: n.kind = SogKind::Mux2; break;
    }
    const int arity = sog_arity(n.kind);
    for (int a = 0; a < arity; ++a) n.fanin.push_back(build_tree(c, rng, depth - 1));
    const int id = static_cast<int>(c.graph.nodes.size());
    c.graph.nodes.push_back(std::move(n));
    return id;
}

Cone tree_cone(uint64_t seed, int depth) {
    Cone c;
    Rng rng(seed);
    const int root = build_tree(c, rng, depth);
    c.graph.nodes.push_back({SogKind::PO, {root}, "po:y[0]"});
    c.graph.outputs.push_back(static_cast<int>(c.graph.nodes.size()) - 1);
    return c;
}

// exact signal probabilities by enumerating all input assignments
std::vector<double> enumerate_p(const Cone& c) {
    const auto& g = c.graph;
    std::vector<double> ones(g.nodes.size(), 0.0);
    const size_t k = c.inputs.size();
    std::vector<int> val(g.nodes.size(), 0);
    for (uint64_t pat = 0; pat < (1ULL << k); ++pat) {
        for (size_t i = 0; i < k; ++i) val[c.inputs[i]] = (pat >> i) & 1;
        for (size_t i = 0; i < g.nodes.size(); ++i) {
            const auto& n = g.nodes[i];
            switch (n.kind) {
            case SogKind::PI: break;
            case SogKind::Not: val[i] = 1 - val[n.fanin[0]]; break;
            case SogKind::And2: val[i] = val[n.fanin[0]] & val[n.fanin[1]]; break;
            case SogKind::Or2: val[i] = val[n.fanin[0]] | val[n.fanin[1]]; break;
            case SogKind::Xor2: val[i] = val[n.fanin[0]] ^ val[n.fanin[1]]; break;
            case SogKind::Mux2:
                val[i] = val[n.fanin[0]] ? val[n.fanin[1]] : val[n.fanin[2]];
                break;
            case SogKind::PO: val[i] = val[n.fanin[0]]; break;
            default: val[i] = 0; break;
            }
            ones[i] += val[i];
        }
    }
    for (auto& v : ones) v /= static_cast<double>(1ULL << k);
    return ones;
}

} // namespace

TEST_CASE("gate probability rules") {
    SogGraph g;
    g.nodes.push_back({SogKind::PI, {}, "a[0]"});
    g.nodes.push_back({SogKind::PI, {}, "b[0]"});
    g.nodes.push_back({SogKind::And2, {0, 1}, ""});
    g.nodes.push_back({SogKind::Or2, {0, 1}, ""});
    g.nodes.push_back({SogKind::Xor2, {0, 1}, ""});
    g.nodes.push_back({SogKind::Not, {0}, ""});
    g.nodes.push_back({SogKind::Const0, {}, ""});
    g.nodes.push_back({SogKind::Const1, {}, ""});
    g.nodes.push_back({SogKind::PO, {2}, "po:y[0]"});
    g.outputs.push_back(8);

    const ActivityMap a = propagate(g);
    CHECK(a.p[2] == doctest::Approx(0.25));     // AND
    CHECK(a.alpha[2] == doctest::Approx(0.375)); // 2 * 0.25 * 0.75
    CHECK(a.p[3] == doctest::Approx(0.75));     // OR
    CHECK(a.p[4] == doctest::Approx(0.5));      // XOR
    CHECK(a.alpha[4] == doctest::Approx(0.5));
    CHECK(a.p[5] == doctest::Approx(0.5));      // NOT
    CHECK(a.p[6] == 0.0);
    CHECK(a.p[7] == 1.0);
    CHECK(a.alpha[6] == 0.0);
    CHECK(a.alpha[7] == 0.0);
    CHECK(a.p[8] == a.p[2]); // PO forwards its fanin
}

TEST_CASE("tree cones match exhaustive enumeration to 1e-12") {
    int checked = 0;
    for (uint64_t seed = 1; checked < 30; ++seed) {
        Cone c = tree_cone(seed, 4);
        if (c.inputs.size() > 12 || c.inputs.empty()) continue;
        ++checked;
        const std::vector<double> exact = enumerate_p(c);
        const ActivityMap a = propagate(c.graph);
        for (size_t i = 0; i < c.graph.nodes.size(); ++i) {
            CHECK(std::abs(a.p[i] - exact[i]) < 1e-12);
            CHECK(std::abs(a.alpha[i] - 2.0 * exact[i] * (1.0 - exact[i])) < 1e-12);
        }
    }
}

TEST_CASE("monte-carlo alpha agrees with propagation on reconvergence-free cones") {
    for (uint64_t seed : {2ULL, 5ULL, 9ULL}) {
        Cone c = tree_cone(seed, 4);
        if (c.inputs.empty()) continue;
        const ActivityMap exact = propagate(c.graph);
        const ActivityMap mc = simulate_activity(c.graph, 10000, 77);
        for (size_t i = 0; i < c.graph.nodes.size(); ++i)
            CHECK(std::abs(mc.alpha[i] - exact.alpha[i]) < 0.05);
    }
}

TEST_CASE("monte-carlo is deterministic in the seed") {
    const SogGraph g = lower(test_helpers::small_alu());
    const ActivityMap a = simulate_activity(g, 2048, 1234);
    const ActivityMap b = simulate_activity(g, 2048, 1234);
    CHECK(a.p == b.p);
    CHECK(a.alpha == b.alpha);
    const ActivityMap c = simulate_activity(g, 2048, 1235);
    CHECK(a.alpha != c.alpha);
}

TEST_CASE("sequential loops reach a fixed point") {
    // a toggling register: q' = NOT q -> p = 0.5 regardless of start
    SogGraph g;
    g.nodes.push_back({SogKind::Dff, {1}, "q[0]"});
    g.nodes.push_back({SogKind::Not, {0}, ""});
    g.registers.push_back(0);
    const ActivityMap a = propagate(g);
    CHECK(a.p[0] == doctest::Approx(0.5));
    CHECK(a.p[1] == doctest::Approx(0.5));

    // the alu design (enabled register feedback) also converges
    const SogGraph alu = lower(test_helpers::small_alu());
    const ActivityMap m = propagate(alu);
    for (double p : m.p) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
    }
}

TEST_CASE("biased inputs shift the propagated probabilities") {
    SogGraph g;
    g.nodes.push_back({SogKind::PI, {}, "a[0]"});
    g.nodes.push_back({SogKind::PI, {}, "b[0]"});
    g.nodes.push_back({SogKind::And2, {0, 1}, ""});
    g.nodes.push_back({SogKind::PO, {2}, "po:y[0]"});
    g.outputs.push_back(3);
    const ActivityMap a = propagate(g, 0.9);
    CHECK(a.p[2] == doctest::Approx(0.81));
    CHECK(a.alpha[2] == doctest::Approx(2.0 * 0.81 * 0.19));
}
