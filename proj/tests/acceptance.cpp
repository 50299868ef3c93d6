// Acceptance gate: one line per criterion, non-zero exit when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "sogppa/activity.hpp"
#include "sogppa/cli.hpp"
#include "sogppa/estimators.hpp"
#include "sogppa/model_io.hpp"
#include "sogppa/rng.hpp"

using namespace sogppa;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int input_bits(const WordDesign& d) {
    int bits = 0;
    for (const auto& p : d.ports)
        if (p.is_input) bits += p.width;
    return bits;
}

// ---- criterion: exhaustive lowering equivalence on 200 designs -------------

void check_equivalence_corpus() {
    const auto t0 = std::chrono::steady_clock::now();
    int checked = 0, exhaustive = 0, equivalent = 0;
    for (uint64_t seed = 1; checked < 200; ++seed) {
        GenParams p;
        p.seed = seed;
        p.n_stages = 1 + static_cast<int>(seed % 3);
        p.width_max = 3;
        p.ops_per_stage = 5;
        const WordDesign d = generate_design(p);
        if (input_bits(d) > 16) continue;
        ++checked;
        const EquivalenceVerdict v = check_equivalence(d, lower(d));
        if (v.exhaustive) ++exhaustive;
        if (v.equivalent) ++equivalent;
    }
    const double dt = seconds_since(t0);
    const bool ok = equivalent == 200 && exhaustive == 200 && dt < 120.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%d/200 equivalent, %d/200 exhaustive, %.1f s (limit 120 s)",
                  equivalent, exhaustive, dt);
    report("lowering-equivalence-200", ok, buf);
}

// ---- criterion: sta against exhaustive path enumeration --------------------

struct TimingFixture {
    SogGraph graph;
    AnnotatedGraph ann;
};

// random DAG, retried until the total path count stays enumerable
bool build_timing_fixture(uint64_t seed, TimingFixture& out) {
    Rng rng(seed);
    SogGraph g;
    const int n_pi = static_cast<int>(rng.range(2, 5));
    for (int i = 0; i < n_pi; ++i)
        g.nodes.push_back({SogKind::PI, {}, "pi" + std::to_string(i) + "[0]"});
    const int n_gates = static_cast<int>(rng.range(80, 190));
    for (int i = 0; i < n_gates; ++i) {
        const int hi = static_cast<int>(g.nodes.size()) - 1;
        SogNode n;
        const int pick = static_cast<int>(rng.below(4));
        n.kind = pick == 0 ? SogKind::Not
                           : (pick == 1 ? SogKind::And2
                                        : (pick == 2 ? SogKind::Or2 : SogKind::Xor2));
        for (int a = 0; a < sog_arity(n.kind); ++a)
            n.fanin.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(hi + 1))));
        g.nodes.push_back(std::move(n));
    }
    for (int k = 0; k < 3; ++k) {
        const int tap = static_cast<int>(
            rng.below(static_cast<uint64_t>(n_pi + n_gates)));
        g.nodes.push_back({SogKind::PO, {tap}, "po:o" + std::to_string(k) + "[0]"});
        g.outputs.push_back(static_cast<int>(g.nodes.size()) - 1);
    }
    if (g.nodes.size() > 200) return false;

    // path-count dynamic program; reject graphs the enumerator cannot afford
    std::vector<double> paths_to(g.nodes.size(), 1.0);
    double total = 0;
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        if (!g.nodes[i].fanin.empty()) {
            double s = 0;
            for (int f : g.nodes[i].fanin) s += paths_to[f];
            paths_to[i] = s;
        }
        if (g.nodes[i].kind == SogKind::PO) total += paths_to[i];
        if (paths_to[i] > 5e5) return false;
    }
    if (total > 5e5) return false;

    out.graph = std::move(g);
    out.ann.graph = &out.graph;
    out.ann.setup_ns = 0.04;
    out.ann.clk_to_q_ns = 0.05;
    out.ann.delay_ns.assign(out.graph.nodes.size(), 0.0);
    out.ann.slew_ns.assign(out.graph.nodes.size(), 0.02);
    out.ann.load_fF.assign(out.graph.nodes.size(), 0.0);
    for (size_t i = 0; i < out.graph.nodes.size(); ++i) {
        const SogKind k = out.graph.nodes[i].kind;
        if (k != SogKind::PI && k != SogKind::PO)
            out.ann.delay_ns[i] = 0.01 + 0.3 * rng.real();
    }
    return true;
}

// worst arrival by walking every source-to-node path explicitly
double enumerate_arrival(const TimingFixture& fx, int node) {
    std::function<double(int)> walk = [&](int v) -> double {
        const auto& nd = fx.graph.nodes[v];
        if (nd.fanin.empty()) return 0.0;
        double best = 0.0;
        for (int f : nd.fanin) best = std::max(best, walk(f));
        return best + fx.ann.delay_ns[v];
    };
    return walk(node);
}

void check_sta_oracle() {
    int graphs = 0, endpoints = 0;
    double worst_err = 0;
    for (uint64_t seed = 1; graphs < 50; ++seed) {
        TimingFixture fx;
        if (!build_timing_fixture(seed, fx)) continue;
        ++graphs;
        const TimingResult r = sta(fx.ann, 1.0);
        for (const auto& e : r.endpoints) {
            ++endpoints;
            worst_err = std::max(worst_err,
                                 std::abs(e.arrival_ns - enumerate_arrival(fx, e.node)));
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "50 graphs (<= 200 nodes), %d endpoints, max |err| %.3g (tol 1e-9)",
                  endpoints, worst_err);
    report("sta-path-enumeration", worst_err < 1e-9, buf);
}

// ---- criterion: activity against exhaustive enumeration --------------------

struct ActivityCone {
    SogGraph graph;
    std::vector<int> inputs;
};

int build_cone_node(ActivityCone& c, Rng& rng, int depth) {
    if (depth == 0 || (depth < 3 && rng.below(3) == 0)) {
        const int id = static_cast<int>(c.graph.nodes.size());
        c.graph.nodes.push_back(
            {SogKind::PI, {}, "i" + std::to_string(c.inputs.size()) + "[0]"});
        c.inputs.push_back(id);
        return id;
    }
    SogNode n;
    switch (rng.below(5)) {
    case 0: n.kind = SogKind::Not; break;
    case 1: n.kind = SogKind::And2; break;
    case 2: n.kind = SogKind::Or2; break;
    case 3: n.kind = SogKind::Xor2; break;
    default: n.kind = SogKind::Mux2; break;
    }
    for (int a = 0; a < sog_arity(n.kind); ++a)
        n.fanin.push_back(build_cone_node(c, rng, depth - 1));
    const int id = static_cast<int>(c.graph.nodes.size());
    c.graph.nodes.push_back(std::move(n));
    return id;
}

void check_activity_oracle() {
    double worst_exact = 0, worst_mc = 0;
    int cones = 0;
    for (uint64_t seed = 1; cones < 30; ++seed) {
        ActivityCone c;
        Rng rng(seed);
        const int root = build_cone_node(c, rng, 4);
        if (c.inputs.size() > 12 || c.inputs.empty()) continue;
        c.graph.nodes.push_back({SogKind::PO, {root}, "po:y[0]"});
        c.graph.outputs.push_back(static_cast<int>(c.graph.nodes.size()) - 1);
        ++cones;

        // exact probabilities over all 2^k assignments
        const auto& g = c.graph;
        std::vector<double> ones(g.nodes.size(), 0.0);
        std::vector<int> val(g.nodes.size(), 0);
        const size_t k = c.inputs.size();
        for (uint64_t pat = 0; pat < (1ULL << k); ++pat) {
            for (size_t i = 0; i < k; ++i) val[c.inputs[i]] = (pat >> i) & 1;
            for (size_t i = 0; i < g.nodes.size(); ++i) {
                const auto& nd = g.nodes[i];
                switch (nd.kind) {
                case SogKind::Not: val[i] = 1 - val[nd.fanin[0]]; break;
                case SogKind::And2: val[i] = val[nd.fanin[0]] & val[nd.fanin[1]]; break;
                case SogKind::Or2: val[i] = val[nd.fanin[0]] | val[nd.fanin[1]]; break;
                case SogKind::Xor2: val[i] = val[nd.fanin[0]] ^ val[nd.fanin[1]]; break;
                case SogKind::Mux2:
                    val[i] = val[nd.fanin[0]] ? val[nd.fanin[1]] : val[nd.fanin[2]];
                    break;
                case SogKind::PO: val[i] = val[nd.fanin[0]]; break;
                default: break;
                }
                ones[i] += val[i];
            }
        }
        const ActivityMap prop = propagate(g);
        const ActivityMap mc = simulate_activity(g, 10000, derive_seed(seed, 0xAC));
        for (size_t i = 0; i < g.nodes.size(); ++i) {
            const double p = ones[i] / static_cast<double>(1ULL << k);
            worst_exact = std::max(worst_exact, std::abs(prop.p[i] - p));
            worst_exact =
                std::max(worst_exact, std::abs(prop.alpha[i] - 2.0 * p * (1.0 - p)));
            worst_mc = std::max(worst_mc, std::abs(mc.alpha[i] - prop.alpha[i]));
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "30 cones: max propagation |err| %.3g (tol 1e-12), "
                  "max MC alpha |err| %.3g at 10k cycles (tol 0.05)",
                  worst_exact, worst_mc);
    report("activity-enumeration", worst_exact < 1e-12 && worst_mc < 0.05, buf);
}

// ---- criterion: gcn gradient check ----------------------------------------

void check_gradcheck() {
    GcnModel m;
    m.in_dim = kGcnInDim;
    Rng wr(0x6C0DE);
    m.w1.resize(static_cast<size_t>(m.in_dim) * GcnModel::kHidden1);
    m.b1.resize(GcnModel::kHidden1);
    m.w2.resize(static_cast<size_t>(GcnModel::kHidden1) * GcnModel::kHidden2);
    m.b2.resize(GcnModel::kHidden2);
    m.w_out.resize(GcnModel::kHidden2);
    for (auto* v : {&m.w1, &m.b1, &m.w2, &m.b2, &m.w_out})
        for (auto& x : *v) x = wr.real(-0.3, 0.3);
    m.b_out = 0.1;

    const int n = 24;
    std::vector<double> feats(static_cast<size_t>(n) * kGcnInDim);
    for (auto& f : feats) f = wr.real(0.0, 1.0);
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i < n; ++i)
        edges.emplace_back(i, static_cast<int>(wr.below(static_cast<uint64_t>(i))));
    const GraphTensors g = make_graph_tensors(n, kGcnInDim, std::move(feats), edges);

    const double err = gcn_gradcheck(m, g, 2.5, 200);
    const double corrupted = gcn_gradcheck(m, g, 2.5, 200, true);
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "max rel err %.3g over 200 params (tol 1e-4); sign-corrupt probe %.3g",
                  err, corrupted);
    report("gcn-gradcheck", err < 1e-4 && corrupted > 1e-2, buf);
}

// ---- criterion: metric formulas -------------------------------------------

void check_metrics_oracle() {
    bool ok = true;
    const TargetMetrics m = compute_metrics({2, 4, 6}, {1, 2, 3});
    ok = ok && std::abs(m.r - 1.0) < 1e-9;
    ok = ok && std::abs(m.mape_percent - 100.0) < 1e-9;
    ok = ok && std::abs(m.rrse - std::sqrt(7.0)) < 1e-9;
    const TargetMetrics mean = compute_metrics({2, 2, 2}, {1, 2, 3});
    ok = ok && std::abs(mean.rrse - 1.0) < 1e-9 && !mean.r_defined;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "2x-truth on [1,2,3]: R %.12f, MAPE %.9f%%, RRSE %.12f (want 1, 100, "
                  "sqrt 7, tol 1e-9); mean predictor RRSE %.12f",
                  m.r, m.mape_percent, m.rrse, mean.rrse);
    report("metrics-formulas", ok, buf);
}

// ---- criterion: pipeline determinism --------------------------------------

std::string run_pipeline(const std::string& dir, const std::string& lib, int jobs) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string j = std::to_string(jobs);
    if (run({"--out", dir, "--seed", "9", "--jobs", j, "gen", "--count", "12", "--stages",
             "3", "--ops-per-stage", "8", "--width-max", "6"}) != 0)
        return "";
    if (run({"--lib", lib, "--jobs", j, "golden", "--manifest", dir + "/manifest.json",
             "--mc-cycles", "256"}) != 0)
        return "";
    if (run({"--lib", lib, "--out", dir, "--seed", "9", "--jobs", j, "train",
             "--manifest", dir + "/manifest.json", "--forest-trees", "16", "--gbm-trees",
             "16", "--gcn-epochs", "20"}) != 0)
        return "";
    return read_file(dir + "/manifest.json") + "\x1f" + read_file(dir + "/bundle.json");
}

void check_determinism() {
    const std::string lib = test_helpers::fixture_dir() + "/techlib.lib";
    const std::string base = (fs::temp_directory_path() / "sogppa_accept_det").string();
    const std::string a = run_pipeline(base + "_a", lib, 1);
    const std::string b = run_pipeline(base + "_b", lib, 1);
    const std::string c = run_pipeline(base + "_c", lib, 4);
    fs::remove_all(base + "_a");
    fs::remove_all(base + "_b");
    fs::remove_all(base + "_c");
    const bool ok = !a.empty() && a == b && a == c;
    report("pipeline-determinism", ok,
           ok ? "gen+golden+train byte-identical across reruns and --jobs 1 vs 4"
              : "artifacts differ between reruns or thread counts");
}

// ---- criterion: end-to-end accuracy ---------------------------------------

void check_end_to_end() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string lib_path = test_helpers::fixture_dir() + "/techlib.lib";
    const std::string dir = (fs::temp_directory_path() / "sogppa_accept_e2e").string();
    fs::remove_all(dir);
    fs::create_directories(dir);

    bool ran = run({"--out", dir, "--seed", "42", "gen", "--count", "150"}) == 0;
    ran = ran && run({"--lib", lib_path, "golden", "--manifest",
                      dir + "/manifest.json"}) == 0;
    ran = ran && run({"--lib", lib_path, "--out", dir, "--seed", "42", "train",
                      "--manifest", dir + "/manifest.json"}) == 0;
    if (!ran) {
        report("end-to-end-accuracy", false, "pipeline command failed");
        return;
    }

    const Manifest manifest = load_manifest(dir + "/manifest.json");
    const Library lib = parse_liberty(read_file(lib_path));
    const ModelBundle bundle = load_bundle(dir + "/bundle.json");

    std::vector<PpaPrediction> preds;
    std::vector<GoldenLabels> labels;
    bool seq_exact = true;
    for (const auto& e : manifest.entries) {
        if (e.split != "test") continue;
        const WordDesign d = load_design(manifest, e);
        preds.push_back(predict_ppa(d, lib, bundle));
        labels.push_back(*e.labels);
        if (preds.back().area_seq != labels.back().area_seq) seq_exact = false;
    }
    const Evaluation ev = evaluate(preds, labels);
    const double dt = seconds_since(t0);
    fs::remove_all(dir);

    const bool ok = ev.area.r >= 0.95 && ev.wns.r >= 0.90 && ev.tns.r >= 0.90 &&
                    ev.power.r >= 0.85 && seq_exact && dt < 1800.0;
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "%zu held-out designs: area R %.3f (>= 0.95), wns R %.3f (>= 0.90), "
                  "tns R %.3f (>= 0.90), power R %.3f (>= 0.85), seq area %s, "
                  "%.0f s (limit 1800 s)",
                  preds.size(), ev.area.r, ev.wns.r, ev.tns.r, ev.power.r,
                  seq_exact ? "exact" : "NOT exact", dt);
    report("end-to-end-accuracy", ok, buf);
}

// ---- criterion: optimization soundness ------------------------------------

void check_optimize() {
    int shrunk_or_equal = 0, equivalent = 0, idempotent = 0;
    const int n = 50;
    for (int i = 0; i < n; ++i) {
        GenParams p;
        p.seed = 500 + static_cast<uint64_t>(i);
        p.n_stages = 1 + i % 4;
        p.width_max = 6;
        p.ops_per_stage = 10;
        const WordDesign d = generate_design(p);
        const SogGraph raw = lower(d);
        const SogGraph opt = optimize(raw);
        if (opt.nodes.size() <= raw.nodes.size()) ++shrunk_or_equal;
        if (check_equivalence(d, opt).equivalent) ++equivalent;
        if (print_sog(optimize(opt)) == print_sog(opt)) ++idempotent;
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%d/%d equivalent, %d/%d idempotent, %d/%d never grew", equivalent, n,
                  idempotent, n, shrunk_or_equal, n);
    report("optimize-soundness", equivalent == n && idempotent == n && shrunk_or_equal == n,
           buf);
}

// ---- criterion: model bundle round trip -----------------------------------

void check_bundle_round_trip() {
    // train a small real bundle and push it through serialize/parse twice
    const std::string lib_path = test_helpers::fixture_dir() + "/techlib.lib";
    const std::string dir = (fs::temp_directory_path() / "sogppa_accept_io").string();
    fs::remove_all(dir);
    fs::create_directories(dir);
    bool ran = run({"--out", dir, "--seed", "4", "gen", "--count", "10", "--stages", "3",
                    "--ops-per-stage", "8", "--width-max", "6"}) == 0;
    ran = ran && run({"--lib", lib_path, "golden", "--manifest", dir + "/manifest.json",
                      "--mc-cycles", "256"}) == 0;
    ran = ran && run({"--lib", lib_path, "--out", dir, "--seed", "4", "train",
                      "--manifest", dir + "/manifest.json", "--forest-trees", "16",
                      "--gbm-trees", "16", "--gcn-epochs", "20"}) == 0;
    if (!ran) {
        report("bundle-round-trip", false, "pipeline command failed");
        fs::remove_all(dir);
        return;
    }
    const ModelBundle a = load_bundle(dir + "/bundle.json");
    const ModelBundle b = bundle_from_string(bundle_to_string(a));
    fs::remove_all(dir);

    int identical = 0;
    Rng rng(0x10CA1);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> xp(a.path_dim), xs(a.stage2_dim), xa(a.area_dim);
        for (auto& v : xp) v = rng.real(-3.0, 3.0);
        for (auto& v : xs) v = rng.real(-3.0, 3.0);
        for (auto& v : xa) v = rng.real(-3.0, 3.0);
        const bool same = a.path_forest.predict(xp) == b.path_forest.predict(xp) &&
                          a.wns_gbm.predict(xs) == b.wns_gbm.predict(xs) &&
                          a.tns_gbm.predict(xs) == b.tns_gbm.predict(xs) &&
                          a.area_gbm.predict(xa) == b.area_gbm.predict(xa);
        if (same) ++identical;
    }
    const bool fixpoint = bundle_to_string(b) == bundle_to_string(a);
    const bool gcn_same = a.power_gcn.w1 == b.power_gcn.w1 &&
                          a.power_gcn.w2 == b.power_gcn.w2 &&
                          a.power_gcn.w_out == b.power_gcn.w_out;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%d/100 probes bit-identical, gcn weights %s, serialization %s",
                  identical, gcn_same ? "identical" : "differ",
                  fixpoint ? "fixpoint" : "not stable");
    report("bundle-round-trip", identical == 100 && gcn_same && fixpoint, buf);
}

} // namespace

int main() {
    check_equivalence_corpus();
    check_sta_oracle();
    check_activity_oracle();
    check_gradcheck();
    check_metrics_oracle();
    check_determinism();
    check_end_to_end();
    check_optimize();
    check_bundle_round_trip();
    std::printf("%s: %d criterion(s) failed\n", g_failures ? "FAIL" : "PASS", g_failures);
    return g_failures ? 1 : 0;
}
