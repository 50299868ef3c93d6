#include "sogppa/model_io.hpp"

#include <json.hpp>

#include "sogppa/manifest.hpp"

namespace sogppa {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kFormatVersion = "sog-ppa-models-1";

ordered_json tree_to_json(const RegressionTree& t) {
    ordered_json nodes = ordered_json::array();
    for (const auto& n : t.nodes)
        nodes.push_back(ordered_json::array({n.feature, n.threshold, n.left, n.right, n.value}));
    return nodes;
}

RegressionTree tree_from_json(const ordered_json& j) {
    RegressionTree t;
    for (const auto& n : j) {
        TreeNode node;
        node.feature = n.at(0).get<int>();
        node.threshold = n.at(1).get<double>();
        node.left = n.at(2).get<int>();
        node.right = n.at(3).get<int>();
        node.value = n.at(4).get<double>();
        t.nodes.push_back(node);
    }
    if (t.nodes.empty()) throw ModelIoError("empty tree");
    return t;
}

ordered_json forest_to_json(const Forest& f) {
    ordered_json j;
    j["n_estimators"] = f.params.n_estimators;
    j["max_depth"] = f.params.max_depth;
    j["feature_fraction"] = f.params.feature_fraction;
    j["bootstrap"] = f.params.bootstrap;
    j["seed"] = f.params.seed;
    j["min_samples_leaf"] = f.params.min_samples_leaf;
    ordered_json trees = ordered_json::array();
    for (const auto& t : f.trees) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);
    return j;
}

Forest forest_from_json(const ordered_json& j) {
    Forest f;
    f.params.n_estimators = j.at("n_estimators").get<int>();
    f.params.max_depth = j.at("max_depth").get<int>();
    f.params.feature_fraction = j.at("feature_fraction").get<double>();
    f.params.bootstrap = j.at("bootstrap").get<bool>();
    f.params.seed = j.at("seed").get<uint64_t>();
    f.params.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    for (const auto& t : j.at("trees")) f.trees.push_back(tree_from_json(t));
    return f;
}

ordered_json gbm_to_json(const Gbm& g) {
    ordered_json j;
    j["n_estimators"] = g.params.n_estimators;
    j["max_depth"] = g.params.max_depth;
    j["learning_rate"] = g.params.learning_rate;
    j["seed"] = g.params.seed;
    j["min_samples_leaf"] = g.params.min_samples_leaf;
    j["base_value"] = g.base_value;
    ordered_json trees = ordered_json::array();
    for (const auto& t : g.trees) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);
    return j;
}

Gbm gbm_from_json(const ordered_json& j) {
    Gbm g;
    g.params.n_estimators = j.at("n_estimators").get<int>();
    g.params.max_depth = j.at("max_depth").get<int>();
    g.params.learning_rate = j.at("learning_rate").get<double>();
    g.params.seed = j.at("seed").get<uint64_t>();
    g.params.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    g.base_value = j.at("base_value").get<double>();
    for (const auto& t : j.at("trees")) g.trees.push_back(tree_from_json(t));
    return g;
}

ordered_json gcn_to_json(const GcnModel& m) {
    ordered_json j;
    j["in_dim"] = m.in_dim;
    j["w1"] = m.w1;
    j["b1"] = m.b1;
    j["w2"] = m.w2;
    j["b2"] = m.b2;
    j["w_out"] = m.w_out;
    j["b_out"] = m.b_out;
    j["target_mean"] = m.target_mean;
    j["target_std"] = m.target_std;
    j["loss_trace"] = m.loss_trace;
    return j;
}

GcnModel gcn_from_json(const ordered_json& j) {
    GcnModel m;
    m.in_dim = j.at("in_dim").get<int>();
    m.w1 = j.at("w1").get<std::vector<double>>();
    m.b1 = j.at("b1").get<std::vector<double>>();
    m.w2 = j.at("w2").get<std::vector<double>>();
    m.b2 = j.at("b2").get<std::vector<double>>();
    m.w_out = j.at("w_out").get<std::vector<double>>();
    m.b_out = j.at("b_out").get<double>();
    m.target_mean = j.at("target_mean").get<double>();
    m.target_std = j.at("target_std").get<double>();
    m.loss_trace = j.at("loss_trace").get<std::vector<double>>();
    if (static_cast<int>(m.w1.size()) != m.in_dim * GcnModel::kHidden1 ||
        m.b1.size() != GcnModel::kHidden1 ||
        m.w2.size() != static_cast<size_t>(GcnModel::kHidden1) * GcnModel::kHidden2 ||
        m.b2.size() != GcnModel::kHidden2 || m.w_out.size() != GcnModel::kHidden2)
        throw ModelIoError("malformed GCN parameter shapes");
    return m;
}

ordered_json wrap(const char* kind, ordered_json payload) {
    ordered_json j;
    j["format"] = kFormatVersion;
    j["kind"] = kind;
    j["model"] = std::move(payload);
    return j;
}

ordered_json unwrap(const std::string& text, const char* kind) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::exception& e) {
        throw ModelIoError(std::string("malformed model document: ") + e.what());
    }
    if (!j.contains("format") || !j.at("format").is_string())
        throw ModelIoError("missing format header");
    const auto fmt = j.at("format").get<std::string>();
    if (fmt != kFormatVersion)
        throw ModelIoError("unsupported model format version '" + fmt + "'");
    if (j.at("kind").get<std::string>() != kind)
        throw ModelIoError("document holds a different model kind");
    return j.at("model");
}

} // namespace

std::string forest_to_string(const Forest& f) { return wrap("forest", forest_to_json(f)).dump(2) + "\n"; }
Forest forest_from_string(const std::string& s) {
    try {
        return forest_from_json(unwrap(s, "forest"));
    } catch (const ordered_json::exception& e) {
        throw ModelIoError(std::string("malformed forest document: ") + e.what());
    }
}

std::string gbm_to_string(const Gbm& g) { return wrap("gbm", gbm_to_json(g)).dump(2) + "\n"; }
Gbm gbm_from_string(const std::string& s) {
    try {
        return gbm_from_json(unwrap(s, "gbm"));
    } catch (const ordered_json::exception& e) {
        throw ModelIoError(std::string("malformed gbm document: ") + e.what());
    }
}

std::string gcn_to_string(const GcnModel& m) { return wrap("gcn", gcn_to_json(m)).dump(2) + "\n"; }
GcnModel gcn_from_string(const std::string& s) {
    try {
        return gcn_from_json(unwrap(s, "gcn"));
    } catch (const ordered_json::exception& e) {
        throw ModelIoError(std::string("malformed gcn document: ") + e.what());
    }
}

std::string bundle_to_string(const ModelBundle& b) {
    ordered_json j;
    j["path_forest"] = forest_to_json(b.path_forest);
    j["wns_gbm"] = gbm_to_json(b.wns_gbm);
    j["tns_gbm"] = gbm_to_json(b.tns_gbm);
    j["area_gbm"] = gbm_to_json(b.area_gbm);
    j["power_gcn"] = gcn_to_json(b.power_gcn);
    ordered_json layout;
    layout["path_dim"] = b.path_dim;
    layout["stage2_dim"] = b.stage2_dim;
    layout["area_dim"] = b.area_dim;
    layout["gcn_in_dim"] = b.gcn_in_dim;
    j["layout"] = std::move(layout);
    j["library_fingerprint"] = b.library_fingerprint;
    j["seed"] = b.seed;
    return wrap("bundle", std::move(j)).dump(2) + "\n";
}

ModelBundle bundle_from_string(const std::string& text) {
    try {
        const ordered_json j = unwrap(text, "bundle");
        ModelBundle b;
        b.path_forest = forest_from_json(j.at("path_forest"));
        b.wns_gbm = gbm_from_json(j.at("wns_gbm"));
        b.tns_gbm = gbm_from_json(j.at("tns_gbm"));
        b.area_gbm = gbm_from_json(j.at("area_gbm"));
        b.power_gcn = gcn_from_json(j.at("power_gcn"));
        const auto& layout = j.at("layout");
        b.path_dim = layout.at("path_dim").get<int>();
        b.stage2_dim = layout.at("stage2_dim").get<int>();
        b.area_dim = layout.at("area_dim").get<int>();
        b.gcn_in_dim = layout.at("gcn_in_dim").get<int>();
        b.library_fingerprint = j.at("library_fingerprint").get<std::string>();
        b.seed = j.at("seed").get<uint64_t>();
        return b;
    } catch (const ordered_json::exception& e) {
        throw ModelIoError(std::string("malformed bundle document: ") + e.what());
    }
}

void save_bundle(const ModelBundle& bundle, const std::string& path) {
    write_file(path, bundle_to_string(bundle));
}

ModelBundle load_bundle(const std::string& path) {
    return bundle_from_string(read_file(path));
}

} // namespace sogppa
