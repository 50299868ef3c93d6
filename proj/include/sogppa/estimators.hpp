#pragma once

#include <string>
#include <vector>

#include "sogppa/activity.hpp"
#include "sogppa/gcn.hpp"
#include "sogppa/manifest.hpp"
#include "sogppa/metrics.hpp"

namespace sogppa {

struct EstimatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// feature layout widths; asserted against bundle contents on load
constexpr int kStage2Dim = 27; // 10 kind counts, n_pi, n_po, depth, wns_r, tns_r,
                               // forest wns/tns aggregates, 10 slack deciles
constexpr int kAreaDim = 17;   // DesignFeatures flattened + naive mapped area
constexpr int kGcnInDim = 14;  // kind one-hot, p, alpha, norm fanout, norm level

// per-design raw material kept so stage-2 features can be recomputed with the
// trained stage-1 forest's predictions
struct DesignRecord {
    std::string name;
    DesignFeatures features;
    double clock_period_ns = 1.0;
    double setup_ns = 0.0;
    double wns_r = 0.0; // analytical, pre-optimization
    double tns_r = 0.0;
    Matrix path_rows;              // worst-K path feature rows
    std::vector<char> path_is_reg; // register endpoint flag per row
    double naive_area_comb = 0.0;  // 1:1 mapped area before optimization

    double golden_wns = 0.0, golden_tns = 0.0;
    double golden_power = 0.0, golden_area_comb = 0.0;
    int64_t matched_paths = 0;
    int64_t dropped_paths = 0; // endpoints the golden flow optimized away
};

struct TrainingTables {
    Matrix path_table; // matched worst-K paths across all designs
    std::vector<double> path_labels; // golden path delay (ns)
    std::vector<DesignRecord> designs;
    Matrix area_table;
    std::vector<double> area_labels; // golden combinational area
    std::vector<GraphTensors> power_graphs;
    std::vector<double> power_labels; // golden total power (uW)
};

struct TrainParams {
    uint64_t seed = 0;
    ForestParams forest; // stage-1 path delays
    GbmParams gbm;       // wns / tns / area heads
    GcnParams gcn;       // power
    int n_jobs = 1;
};

struct ModelBundle {
    Forest path_forest;
    Gbm wns_gbm, tns_gbm, area_gbm;
    GcnModel power_gcn;
    int path_dim = 0, stage2_dim = 0, area_dim = 0, gcn_in_dim = 0;
    std::string library_fingerprint;
    uint64_t seed = 0;
};

struct PpaPrediction {
    std::string design;
    double wns_ns = 0.0;
    double tns_ns = 0.0; // clamped to <= 0
    double power_uW = 0.0;
    double area_seq = 0.0; // exact: n_registers x DFF area
    double area_comb = 0.0;
    double area_total = 0.0;
    // intermediates
    double wns_r = 0.0, tns_r = 0.0;
    std::vector<double> predicted_slacks;
};

struct Evaluation {
    TargetMetrics wns, tns, power, area;
};

TrainingTables extract_training_set(const Manifest& manifest, const Library& lib,
                                    const TimingConfig& cfg = {});

ModelBundle train_all(const TrainingTables& tables, const TrainParams& params);

PpaPrediction predict_ppa(const WordDesign& design, const Library& lib,
                          const ModelBundle& bundle, const TimingConfig& cfg = {});

Evaluation evaluate(const std::vector<PpaPrediction>& predictions,
                    const std::vector<GoldenLabels>& labels);

// helpers shared between training and prediction
GraphTensors design_graph_tensors(const SogGraph& graph, const ActivityMap& activity);
std::vector<double> stage2_features(const DesignFeatures& f, double wns_r, double tns_r,
                                    const std::vector<double>& predicted_slacks);
std::vector<double> area_features(const DesignFeatures& f, double naive_area_comb);
std::string library_fingerprint(const Library& lib);

} // namespace sogppa
