#pragma once

#include <cstdint>
#include <vector>

#include "sogppa/learners.hpp"

namespace sogppa {

// node feature matrix plus symmetrically normalized adjacency
// D^{-1/2} (A + I) D^{-1/2} over the undirected graph skeleton, CSR form
struct GraphTensors {
    int n_nodes = 0;
    int in_dim = 0;
    std::vector<double> features; // row-major n_nodes x in_dim
    std::vector<int> rowptr;      // size n_nodes + 1
    std::vector<int> col;
    std::vector<double> val;
};

// builds Â from an undirected edge list (self-loops added internally)
GraphTensors make_graph_tensors(int n_nodes, int in_dim, std::vector<double> features,
                                const std::vector<std::pair<int, int>>& edges);

struct GcnParams {
    double learning_rate = 0.01;
    int epochs = 100;
    uint64_t seed = 0;
};

// two hidden layers (10 then 70 channels), sum pooling, linear readout
struct GcnModel {
    static constexpr int kHidden1 = 10;
    static constexpr int kHidden2 = 70;

    int in_dim = 0;
    std::vector<double> w1; // in_dim x 10
    std::vector<double> b1; // 10
    std::vector<double> w2; // 10 x 70
    std::vector<double> b2; // 70
    std::vector<double> w_out; // 70
    double b_out = 0.0;
    double target_mean = 0.0;
    double target_std = 1.0;

    std::vector<double> loss_trace; // per-epoch training MSE (normalized space)

    double forward(const GraphTensors& g) const;                 // de-normalized
    double forward_normalized(const GraphTensors& g) const;
};

GcnModel gcn_train(const std::vector<GraphTensors>& graphs,
                   const std::vector<double>& targets, const GcnParams& params);

// max relative error between backprop and central finite differences of the
// MSE loss, over >= n_samples sampled parameters
double gcn_gradcheck(const GcnModel& model, const GraphTensors& g, double target,
                     int n_samples = 200, bool corrupt_w2_sign = false);

} // namespace sogppa
