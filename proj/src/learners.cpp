#include "sogppa/learners.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <numeric>
#include <thread>

#include "sogppa/rng.hpp"

namespace sogppa {

namespace {

struct BuildCtx {
    const Matrix& X;
    const std::vector<double>& y;
    int max_depth;
    int min_samples_leaf;
    double feature_fraction;
    Rng* rng; // feature subsampling; null = use all features
};

double mean_of(const std::vector<double>& y, const std::vector<int>& idx) {
    double s = 0;
    for (int i : idx) s += y[i];
    return s / static_cast<double>(idx.size());
}

struct Split {
    bool found = false;
    int feature = -1;
    double threshold = 0;
    double reduction = 0;
};

Split best_split(const BuildCtx& ctx, const std::vector<int>& idx) {
    const int n_features = static_cast<int>(ctx.X[0].size());
    std::vector<int> features(n_features);
    std::iota(features.begin(), features.end(), 0);
    if (ctx.rng && ctx.feature_fraction < 1.0) {
        const int k = std::max(
            1, static_cast<int>(std::ceil(ctx.feature_fraction * n_features)));
        for (int i = 0; i < k; ++i) {
            const int j = i + static_cast<int>(ctx.rng->below(
                                  static_cast<uint64_t>(n_features - i)));
            std::swap(features[i], features[j]);
        }
        features.resize(k);
        std::sort(features.begin(), features.end());
    }

    const auto n = idx.size();
    double total = 0, total_sq = 0;
    for (int i : idx) {
        total += ctx.y[i];
        total_sq += ctx.y[i] * ctx.y[i];
    }
    const double parent_sse = total_sq - total * total / static_cast<double>(n);

    Split best;
    std::vector<std::pair<double, double>> pts(n); // (feature value, y)
    for (int f : features) {
        for (size_t i = 0; i < n; ++i) pts[i] = {ctx.X[idx[i]][f], ctx.y[idx[i]]};
        std::sort(pts.begin(), pts.end());
        double left_sum = 0, left_sq = 0;
        for (size_t i = 0; i + 1 < n; ++i) {
            left_sum += pts[i].second;
            left_sq += pts[i].second * pts[i].second;
            if (pts[i].first == pts[i + 1].first) continue;
            const auto nl = static_cast<double>(i + 1);
            const auto nr = static_cast<double>(n - i - 1);
            if (nl < ctx.min_samples_leaf || nr < ctx.min_samples_leaf) continue;
            const double right_sum = total - left_sum;
            const double right_sq = total_sq - left_sq;
            const double sse =
                (left_sq - left_sum * left_sum / nl) + (right_sq - right_sum * right_sum / nr);
            const double reduction = parent_sse - sse;
            // strict improvement keeps the lowest feature index / threshold on ties
            if (reduction > best.reduction) {
                best.found = true;
                best.feature = f;
                // midpoint of adjacent doubles can round up to the right
                // value, which would leave the right partition empty
                double thr = 0.5 * (pts[i].first + pts[i + 1].first);
                if (thr >= pts[i + 1].first) thr = pts[i].first;
                best.threshold = thr;
                best.reduction = reduction;
            }
        }
    }
    return best;
}

int build_node(BuildCtx& ctx, std::vector<TreeNode>& nodes, const std::vector<int>& idx,
               int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[id].value = mean_of(ctx.y, idx);

    bool constant = true;
    for (int i : idx)
        if (ctx.y[i] != ctx.y[idx[0]]) {
            constant = false;
            break;
        }
    if (constant || depth >= ctx.max_depth ||
        static_cast<int>(idx.size()) < 2 * ctx.min_samples_leaf)
        return id;

    Split s = best_split(ctx, idx);
    if (!s.found || s.reduction <= 0) return id;

    std::vector<int> left, right;
    for (int i : idx)
        (ctx.X[i][s.feature] <= s.threshold ? left : right).push_back(i);
    nodes[id].feature = s.feature;
    nodes[id].threshold = s.threshold;
    const int l = build_node(ctx, nodes, left, depth + 1);
    const int r = build_node(ctx, nodes, right, depth + 1);
    nodes[id].left = l;
    nodes[id].right = r;
    return id;
}

RegressionTree fit_tree_impl(const Matrix& X, const std::vector<double>& y, int max_depth,
                             int min_samples_leaf, double feature_fraction, Rng* rng,
                             const std::vector<int>* sample) {
    if (X.empty() || X.size() != y.size()) throw LearnerError("empty dataset or size mismatch");
    for (const auto& row : X)
        if (row.size() != X[0].size()) throw LearnerError("ragged feature matrix");
    BuildCtx ctx{X, y, max_depth, min_samples_leaf, feature_fraction, rng};
    std::vector<int> idx;
    if (sample) {
        idx = *sample;
    } else {
        idx.resize(X.size());
        std::iota(idx.begin(), idx.end(), 0);
    }
    RegressionTree t;
    build_node(ctx, t.nodes, idx, 0);
    return t;
}

} // namespace

double RegressionTree::predict(const std::vector<double>& x) const {
    int cur = 0;
    while (nodes[cur].feature >= 0) {
        if (nodes[cur].feature >= static_cast<int>(x.size()))
            throw LearnerError("feature dimension mismatch");
        cur = x[nodes[cur].feature] <= nodes[cur].threshold ? nodes[cur].left
                                                            : nodes[cur].right;
    }
    return nodes[cur].value;
}

double Forest::predict(const std::vector<double>& x) const {
    double s = 0;
    for (const auto& t : trees) s += t.predict(x);
    return s / static_cast<double>(trees.size());
}

double Gbm::predict(const std::vector<double>& x) const {
    double s = base_value;
    for (const auto& t : trees) s += params.learning_rate * t.predict(x);
    return s;
}

RegressionTree fit_tree(const Matrix& X, const std::vector<double>& y,
                        const TreeParams& params) {
    return fit_tree_impl(X, y, params.max_depth, params.min_samples_leaf, 1.0, nullptr,
                         nullptr);
}

Forest fit_forest(const Matrix& X, const std::vector<double>& y, const ForestParams& params,
                  int n_jobs) {
    if (X.empty() || X.size() != y.size()) throw LearnerError("empty dataset or size mismatch");
    Forest forest;
    forest.params = params;
    forest.trees.resize(params.n_estimators);

    auto fit_one = [&](int t) {
        // per-tree sub-seed via splitmix derivation from the master seed
        Rng rng(derive_seed(params.seed, static_cast<uint64_t>(t)));
        std::vector<int> sample;
        if (params.bootstrap) {
            sample.resize(X.size());
            for (auto& s : sample)
                s = static_cast<int>(rng.below(static_cast<uint64_t>(X.size())));
        } else {
            sample.resize(X.size());
            std::iota(sample.begin(), sample.end(), 0);
        }
        forest.trees[t] = fit_tree_impl(X, y, params.max_depth, params.min_samples_leaf,
                                        params.feature_fraction, &rng, &sample);
    };

    if (n_jobs <= 1) {
        for (int t = 0; t < params.n_estimators; ++t) fit_one(t);
    } else {
        std::vector<std::thread> workers;
        std::atomic<int> next{0};
        for (int w = 0; w < n_jobs; ++w)
            workers.emplace_back([&] {
                for (int t; (t = next.fetch_add(1)) < params.n_estimators;) fit_one(t);
            });
        for (auto& w : workers) w.join();
    }
    return forest;
}

Gbm fit_gbm(const Matrix& X, const std::vector<double>& y, const GbmParams& params) {
    if (X.empty() || X.size() != y.size()) throw LearnerError("empty dataset or size mismatch");
    Gbm gbm;
    gbm.params = params;
    gbm.base_value = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());

    std::vector<double> pred(y.size(), gbm.base_value);
    std::vector<double> residual(y.size());
    for (int stage = 0; stage < params.n_estimators; ++stage) {
        for (size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - pred[i];
        RegressionTree t = fit_tree_impl(X, residual, params.max_depth,
                                         params.min_samples_leaf, 1.0, nullptr, nullptr);
        for (size_t i = 0; i < y.size(); ++i)
            pred[i] += params.learning_rate * t.predict(X[i]);
        gbm.trees.push_back(std::move(t));
    }
    return gbm;
}

} // namespace sogppa
