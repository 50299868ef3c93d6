#include "sogppa/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sogppa/rng.hpp"

namespace sogppa {

namespace {

// predicted endpoint slacks for one design under the stage-1 forest
std::vector<double> forest_slacks(const Forest& forest, const DesignRecord& rec) {
    std::vector<double> slacks(rec.path_rows.size());
    for (size_t i = 0; i < rec.path_rows.size(); ++i) {
        const double delay = forest.predict(rec.path_rows[i]);
        slacks[i] = rec.clock_period_ns - delay - (rec.path_is_reg[i] ? rec.setup_ns : 0.0);
    }
    return slacks;
}

double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

} // namespace

GraphTensors design_graph_tensors(const SogGraph& graph, const ActivityMap& activity) {
    const int n = static_cast<int>(graph.nodes.size());
    const auto fanouts = graph.fanouts();
    const auto levels = graph.levels();
    int max_level = 0;
    size_t max_fanout = 1;
    for (int i = 0; i < n; ++i) {
        max_level = std::max(max_level, levels[i]);
        max_fanout = std::max(max_fanout, fanouts[i].size());
    }

    std::vector<double> features(static_cast<size_t>(n) * kGcnInDim, 0.0);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) {
        double* row = features.data() + static_cast<size_t>(i) * kGcnInDim;
        row[static_cast<int>(graph.nodes[i].kind)] = 1.0;
        row[kNumSogKinds] = activity.p[i];
        // toggle rate per ns rather than per cycle: power scales with clock
        // frequency and the graph carries no other timing information
        row[kNumSogKinds + 1] = activity.alpha[i] / graph.clock_period_ns;
        row[kNumSogKinds + 2] =
            static_cast<double>(fanouts[i].size()) / static_cast<double>(max_fanout);
        row[kNumSogKinds + 3] =
            max_level > 0 ? static_cast<double>(levels[i]) / max_level : 0.0;
        for (int f : graph.nodes[i].fanin) edges.emplace_back(f, i);
    }
    return make_graph_tensors(n, kGcnInDim, std::move(features), edges);
}

std::vector<double> stage2_features(const DesignFeatures& f, double wns_r, double tns_r,
                                    const std::vector<double>& predicted_slacks) {
    std::vector<double> row;
    row.reserve(kStage2Dim);
    for (int64_t c : f.kind_counts) row.push_back(static_cast<double>(c));
    row.push_back(static_cast<double>(f.n_pi));
    row.push_back(static_cast<double>(f.n_po));
    row.push_back(static_cast<double>(f.combinational_depth));
    row.push_back(wns_r);
    row.push_back(tns_r);

    std::vector<double> sorted = predicted_slacks;
    std::sort(sorted.begin(), sorted.end());
    double worst = 0, neg_sum = 0;
    if (!sorted.empty()) {
        worst = sorted.front();
        for (double s : sorted) neg_sum += std::min(0.0, s);
    }
    row.push_back(worst);   // forest-aggregated WNS-style minimum
    row.push_back(neg_sum); // forest-aggregated TNS-style negative sum
    for (int i = 0; i < 10; ++i)
        row.push_back(sorted.empty() ? 0.0 : quantile(sorted, i / 9.0));
    return row;
}

std::vector<double> area_features(const DesignFeatures& f, double naive_area_comb) {
    std::vector<double> row;
    row.reserve(kAreaDim);
    for (int64_t c : f.kind_counts) row.push_back(static_cast<double>(c));
    row.push_back(static_cast<double>(f.n_registers));
    row.push_back(static_cast<double>(f.n_pi));
    row.push_back(static_cast<double>(f.n_po));
    row.push_back(static_cast<double>(f.combinational_depth));
    row.push_back(static_cast<double>(f.total_fanout));
    row.push_back(f.mean_fanout);
    row.push_back(naive_area_comb);
    return row;
}

std::string library_fingerprint(const Library& lib) {
    const std::string text = print_liberty(lib);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

TrainingTables extract_training_set(const Manifest& manifest, const Library& lib,
                                    const TimingConfig& cfg) {
    TrainingTables tables;
    bool any = false;
    for (const auto& entry : manifest.entries) {
        if (entry.split != "train") continue;
        any = true;
        if (!entry.labels)
            throw EstimatorError("design " + entry.name + " has no golden labels");

        const WordDesign design = load_design(manifest, entry);
        const SogGraph g = lower(design);
        const AnnotatedGraph ann = annotate(g, lib, cfg);
        const TimingResult timing = sta(ann, design.clock_period_ns);
        const std::vector<Path> paths = worst_paths(timing, ann);

        DesignRecord rec;
        rec.name = entry.name;
        rec.features = sog_features(g);
        rec.clock_period_ns = design.clock_period_ns;
        rec.setup_ns = ann.setup_ns;
        rec.wns_r = timing.wns_r;
        rec.tns_r = timing.tns_r;
        for (const Path& p : paths) {
            rec.path_rows.push_back(path_features(p, ann).as_row());
            rec.path_is_reg.push_back(p.endpoint_is_register ? 1 : 0);
            auto it = entry.labels->path_delay_ns.find({p.source_identity, p.sink_identity});
            if (it == entry.labels->path_delay_ns.end()) {
                ++rec.dropped_paths; // endpoint cone optimized away in the golden flow
                continue;
            }
            ++rec.matched_paths;
            tables.path_table.push_back(rec.path_rows.back());
            tables.path_labels.push_back(it->second);
        }

        for (int k = 0; k < kNumSogKinds; ++k) {
            const auto kind = static_cast<SogKind>(k);
            auto it = cfg.cell_binding.find(kind);
            if (it == cfg.cell_binding.end() || kind == SogKind::Dff) continue;
            rec.naive_area_comb +=
                static_cast<double>(rec.features.kind_counts[k]) * lib.attr(it->second, "area");
        }
        rec.golden_wns = entry.labels->wns_ns;
        rec.golden_tns = entry.labels->tns_ns;
        rec.golden_power = entry.labels->power_uW;
        rec.golden_area_comb = entry.labels->area_comb;

        tables.area_table.push_back(area_features(rec.features, rec.naive_area_comb));
        tables.area_labels.push_back(rec.golden_area_comb);
        tables.power_graphs.push_back(design_graph_tensors(g, propagate(g)));
        tables.power_labels.push_back(rec.golden_power);
        tables.designs.push_back(std::move(rec));
    }
    if (!any) throw EstimatorError("manifest has no training designs");
    return tables;
}

ModelBundle train_all(const TrainingTables& tables, const TrainParams& params) {
    if (tables.path_table.empty() || tables.designs.empty())
        throw EstimatorError("empty training tables");

    ModelBundle bundle;
    bundle.seed = params.seed;

    ForestParams fp = params.forest;
    fp.seed = derive_seed(params.seed, 1);
    bundle.path_forest = fit_forest(tables.path_table, tables.path_labels, fp, params.n_jobs);

    Matrix stage2;
    std::vector<double> wns_y, tns_y;
    for (const auto& rec : tables.designs) {
        stage2.push_back(stage2_features(rec.features, rec.wns_r, rec.tns_r,
                                         forest_slacks(bundle.path_forest, rec)));
        wns_y.push_back(rec.golden_wns);
        tns_y.push_back(rec.golden_tns);
    }
    GbmParams gp = params.gbm;
    gp.seed = derive_seed(params.seed, 2);
    bundle.wns_gbm = fit_gbm(stage2, wns_y, gp);
    gp.seed = derive_seed(params.seed, 3);
    bundle.tns_gbm = fit_gbm(stage2, tns_y, gp);
    gp.seed = derive_seed(params.seed, 4);
    bundle.area_gbm = fit_gbm(tables.area_table, tables.area_labels, gp);

    GcnParams gcn = params.gcn;
    gcn.seed = derive_seed(params.seed, 5);
    bundle.power_gcn = gcn_train(tables.power_graphs, tables.power_labels, gcn);

    bundle.path_dim = PathFeatureVector::kDim;
    bundle.stage2_dim = kStage2Dim;
    bundle.area_dim = kAreaDim;
    bundle.gcn_in_dim = kGcnInDim;
    return bundle;
}

PpaPrediction predict_ppa(const WordDesign& design, const Library& lib,
                          const ModelBundle& bundle, const TimingConfig& cfg) {
    if (bundle.path_dim != PathFeatureVector::kDim || bundle.stage2_dim != kStage2Dim ||
        bundle.area_dim != kAreaDim || bundle.gcn_in_dim != kGcnInDim)
        throw EstimatorError("model bundle feature layout does not match this build");

    const SogGraph g = lower(design);
    const AnnotatedGraph ann = annotate(g, lib, cfg);
    const TimingResult timing = sta(ann, design.clock_period_ns);
    const std::vector<Path> paths = worst_paths(timing, ann);
    const DesignFeatures feats = sog_features(g);

    PpaPrediction out;
    out.design = design.name;
    out.wns_r = timing.wns_r;
    out.tns_r = timing.tns_r;

    DesignRecord rec;
    rec.features = feats;
    rec.clock_period_ns = design.clock_period_ns;
    rec.setup_ns = ann.setup_ns;
    for (const Path& p : paths) {
        rec.path_rows.push_back(path_features(p, ann).as_row());
        rec.path_is_reg.push_back(p.endpoint_is_register ? 1 : 0);
    }
    out.predicted_slacks = forest_slacks(bundle.path_forest, rec);

    const auto s2 = stage2_features(feats, timing.wns_r, timing.tns_r, out.predicted_slacks);
    out.wns_ns = bundle.wns_gbm.predict(s2);
    out.tns_ns = std::min(0.0, bundle.tns_gbm.predict(s2));

    double naive_area = 0;
    for (int k = 0; k < kNumSogKinds; ++k) {
        const auto kind = static_cast<SogKind>(k);
        auto it = cfg.cell_binding.find(kind);
        if (it == cfg.cell_binding.end() || kind == SogKind::Dff) continue;
        naive_area += static_cast<double>(feats.kind_counts[k]) * lib.attr(it->second, "area");
    }
    out.area_comb = std::max(0.0, bundle.area_gbm.predict(area_features(feats, naive_area)));
    out.area_seq = static_cast<double>(feats.n_registers) *
                   lib.attr(cfg.cell_for(SogKind::Dff), "area");
    out.area_total = out.area_seq + out.area_comb;

    out.power_uW = bundle.power_gcn.forward(design_graph_tensors(g, propagate(g)));
    return out;
}

Evaluation evaluate(const std::vector<PpaPrediction>& predictions,
                    const std::vector<GoldenLabels>& labels) {
    if (predictions.size() != labels.size())
        throw EstimatorError("prediction/label count mismatch");
    if (predictions.size() < 2) throw EstimatorError("need at least 2 designs");

    std::vector<double> pw, tw, pt, tt, pp, tp, pa, ta;
    for (size_t i = 0; i < predictions.size(); ++i) {
        pw.push_back(predictions[i].wns_ns);
        tw.push_back(labels[i].wns_ns);
        pt.push_back(predictions[i].tns_ns);
        tt.push_back(labels[i].tns_ns);
        pp.push_back(predictions[i].power_uW);
        tp.push_back(labels[i].power_uW);
        pa.push_back(predictions[i].area_total);
        ta.push_back(labels[i].area_comb + labels[i].area_seq);
    }
    Evaluation e;
    e.wns = compute_metrics(pw, tw);
    e.tns = compute_metrics(pt, tt);
    e.power = compute_metrics(pp, tp);
    e.area = compute_metrics(pa, ta);
    return e;
}

} // namespace sogppa
