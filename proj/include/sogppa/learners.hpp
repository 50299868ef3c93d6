#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sogppa {

struct LearnerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Matrix = std::vector<std::vector<double>>; // rows x features

struct TreeParams {
    int max_depth = 20;
    int min_samples_leaf = 2;
};

struct ForestParams {
    int n_estimators = 80;
    int max_depth = 20;
    double feature_fraction = 1.0 / 3.0;
    bool bootstrap = true;
    uint64_t seed = 0;
    int min_samples_leaf = 2;
};

struct GbmParams {
    int n_estimators = 45;
    int max_depth = 8;
    double learning_rate = 0.1;
    uint64_t seed = 0;
    int min_samples_leaf = 2;
};

// flat binary tree; leaves have feature == -1 and value set
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;
    double predict(const std::vector<double>& x) const;
};

struct Forest {
    ForestParams params;
    std::vector<RegressionTree> trees;
    double predict(const std::vector<double>& x) const; // mean of tree outputs
};

struct Gbm {
    GbmParams params;
    double base_value = 0.0; // training-target mean
    std::vector<RegressionTree> trees;
    double predict(const std::vector<double>& x) const;
};

// Greedy variance-reduction CART. Candidate thresholds are midpoints between
// consecutive distinct sorted feature values; ties broken by lowest feature
// index then lowest threshold.
RegressionTree fit_tree(const Matrix& X, const std::vector<double>& y,
                        const TreeParams& params);

Forest fit_forest(const Matrix& X, const std::vector<double>& y, const ForestParams& params,
                  int n_jobs = 1);

Gbm fit_gbm(const Matrix& X, const std::vector<double>& y, const GbmParams& params);

} // namespace sogppa
