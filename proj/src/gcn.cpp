#include "sogppa/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sogppa/kernels.hpp"
#include "sogppa/rng.hpp"

namespace sogppa {

GraphTensors make_graph_tensors(int n_nodes, int in_dim, std::vector<double> features,
                                const std::vector<std::pair<int, int>>& edges) {
    GraphTensors g;
    g.n_nodes = n_nodes;
    g.in_dim = in_dim;
    g.features = std::move(features);
    if (static_cast<int>(g.features.size()) != n_nodes * in_dim)
        throw LearnerError("feature matrix size mismatch");

    // undirected adjacency + self loops, deduplicated
    std::vector<std::vector<int>> adj(n_nodes);
    for (auto [a, b] : edges) {
        if (a == b) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (int i = 0; i < n_nodes; ++i) {
        adj[i].push_back(i);
        std::sort(adj[i].begin(), adj[i].end());
        adj[i].erase(std::unique(adj[i].begin(), adj[i].end()), adj[i].end());
    }
    std::vector<double> inv_sqrt_deg(n_nodes);
    for (int i = 0; i < n_nodes; ++i)
        inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(adj[i].size()));

    g.rowptr.push_back(0);
    for (int i = 0; i < n_nodes; ++i) {
        for (int j : adj[i]) {
            g.col.push_back(j);
            g.val.push_back(inv_sqrt_deg[i] * inv_sqrt_deg[j]);
        }
        g.rowptr.push_back(static_cast<int>(g.col.size()));
    }
    return g;
}

namespace {

constexpr int kH1 = GcnModel::kHidden1;
constexpr int kH2 = GcnModel::kHidden2;

// forward intermediates for one graph
struct Activations {
    std::vector<double> m1, p1, h1; // n x 10 (pre-spmm, pre-relu, post-relu)
    std::vector<double> m2, p2, h2; // n x 70
    std::vector<double> pooled;     // 70
    double y_norm = 0;
};

void forward_graph(const GcnModel& model, const GraphTensors& g, Activations& act) {
    const auto& K = active_kernels();
    const int n = g.n_nodes;
    if (g.in_dim != model.in_dim) throw LearnerError("GCN input dimension mismatch");

    act.m1.resize(static_cast<size_t>(n) * kH1);
    act.p1.resize(static_cast<size_t>(n) * kH1);
    K.matmul_nn(g.features.data(), model.w1.data(), act.m1.data(), n, model.in_dim, kH1,
                false);
    K.spmm(g.rowptr.data(), g.col.data(), g.val.data(), act.m1.data(), act.p1.data(), n,
           kH1);
    K.add_row(act.p1.data(), model.b1.data(), n, kH1);
    act.h1 = act.p1;
    K.relu(act.h1.data(), n * kH1);

    act.m2.resize(static_cast<size_t>(n) * kH2);
    act.p2.resize(static_cast<size_t>(n) * kH2);
    K.matmul_nn(act.h1.data(), model.w2.data(), act.m2.data(), n, kH1, kH2, false);
    K.spmm(g.rowptr.data(), g.col.data(), g.val.data(), act.m2.data(), act.p2.data(), n,
           kH2);
    K.add_row(act.p2.data(), model.b2.data(), n, kH2);
    act.h2 = act.p2;
    K.relu(act.h2.data(), n * kH2);

    act.pooled.resize(kH2);
    K.col_sum(act.h2.data(), act.pooled.data(), n, kH2);

    double y = model.b_out;
    for (int j = 0; j < kH2; ++j) y += act.pooled[j] * model.w_out[j];
    act.y_norm = y;
}

struct Gradients {
    std::vector<double> w1, b1, w2, b2, w_out;
    double b_out = 0;

    explicit Gradients(int in_dim)
        : w1(static_cast<size_t>(in_dim) * kH1, 0.0),
          b1(kH1, 0.0),
          w2(static_cast<size_t>(kH1) * kH2, 0.0),
          b2(kH2, 0.0),
          w_out(kH2, 0.0) {}

    void zero() {
        std::fill(w1.begin(), w1.end(), 0.0);
        std::fill(b1.begin(), b1.end(), 0.0);
        std::fill(w2.begin(), w2.end(), 0.0);
        std::fill(b2.begin(), b2.end(), 0.0);
        std::fill(w_out.begin(), w_out.end(), 0.0);
        b_out = 0;
    }
};

// accumulates d((y_norm - target_norm)^2 * scale)/dtheta into grads
void backward_graph(const GcnModel& model, const GraphTensors& g, const Activations& act,
                    double target_norm, double scale, Gradients& grads,
                    bool corrupt_w2_sign = false) {
    const auto& K = active_kernels();
    const int n = g.n_nodes;
    const double dy = 2.0 * (act.y_norm - target_norm) * scale;

    grads.b_out += dy;
    K.axpy(dy, act.pooled.data(), grads.w_out.data(), kH2);

    // dH2[i][j] = dy * w_out[j], masked by the layer-2 relu
    std::vector<double> dp2(static_cast<size_t>(n) * kH2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < kH2; ++j) dp2[static_cast<size_t>(i) * kH2 + j] = dy * model.w_out[j];
    K.relu_mask(act.p2.data(), dp2.data(), n * kH2);

    std::vector<double> db2(kH2);
    K.col_sum(dp2.data(), db2.data(), n, kH2);
    K.axpy(1.0, db2.data(), grads.b2.data(), kH2);

    // Â is symmetric, so the adjoint of spmm is spmm again
    std::vector<double> dm2(static_cast<size_t>(n) * kH2);
    K.spmm(g.rowptr.data(), g.col.data(), g.val.data(), dp2.data(), dm2.data(), n, kH2);

    if (corrupt_w2_sign) {
        std::vector<double> tmp(model.w2.size(), 0.0);
        K.matmul_tn(act.h1.data(), dm2.data(), tmp.data(), n, kH1, kH2, false);
        K.axpy(-1.0, tmp.data(), grads.w2.data(), static_cast<int>(tmp.size()));
    } else {
        K.matmul_tn(act.h1.data(), dm2.data(), grads.w2.data(), n, kH1, kH2, true);
    }

    std::vector<double> dp1(static_cast<size_t>(n) * kH1);
    K.matmul_nt(dm2.data(), model.w2.data(), dp1.data(), n, kH2, kH1, false);
    K.relu_mask(act.p1.data(), dp1.data(), n * kH1);

    std::vector<double> db1(kH1);
    K.col_sum(dp1.data(), db1.data(), n, kH1);
    K.axpy(1.0, db1.data(), grads.b1.data(), kH1);

    std::vector<double> dm1(static_cast<size_t>(n) * kH1);
    K.spmm(g.rowptr.data(), g.col.data(), g.val.data(), dp1.data(), dm1.data(), n, kH1);
    K.matmul_tn(g.features.data(), dm1.data(), grads.w1.data(), n, model.in_dim, kH1, true);
}

void glorot_init(std::vector<double>& w, int fan_in, int fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& x : w) x = rng.real(-limit, limit);
}

struct Adam {
    std::vector<double> m, v;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    int t = 0;

    explicit Adam(size_t n) : m(n, 0.0), v(n, 0.0) {}

    void step(double lr, std::vector<double*> params, std::vector<const double*> grads,
              std::vector<size_t> sizes) {
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, t);
        const double bc2 = 1.0 - std::pow(beta2, t);
        size_t off = 0;
        for (size_t g = 0; g < params.size(); ++g) {
            for (size_t i = 0; i < sizes[g]; ++i, ++off) {
                const double grad = grads[g][i];
                m[off] = beta1 * m[off] + (1 - beta1) * grad;
                v[off] = beta2 * v[off] + (1 - beta2) * grad * grad;
                params[g][i] -= lr * (m[off] / bc1) / (std::sqrt(v[off] / bc2) + eps);
            }
        }
    }
};

} // namespace

double GcnModel::forward_normalized(const GraphTensors& g) const {
    Activations act;
    forward_graph(*this, g, act);
    return act.y_norm;
}

double GcnModel::forward(const GraphTensors& g) const {
    return forward_normalized(g) * target_std + target_mean;
}

GcnModel gcn_train(const std::vector<GraphTensors>& graphs,
                   const std::vector<double>& targets, const GcnParams& params) {
    if (graphs.empty() || graphs.size() != targets.size())
        throw LearnerError("need >= 1 training graph with matching targets");

    GcnModel model;
    model.in_dim = graphs[0].in_dim;
    Rng rng(derive_seed(params.seed, 0x6C4));
    model.w1.resize(static_cast<size_t>(model.in_dim) * kH1);
    model.b1.assign(kH1, 0.0);
    model.w2.resize(static_cast<size_t>(kH1) * kH2);
    model.b2.assign(kH2, 0.0);
    model.w_out.resize(kH2);
    glorot_init(model.w1, model.in_dim, kH1, rng);
    glorot_init(model.w2, kH1, kH2, rng);
    // the readout starts at zero: sum pooling makes |g| grow with graph size,
    // so a random readout would swamp the first epochs with scale correction
    std::fill(model.w_out.begin(), model.w_out.end(), 0.0);

    const auto n = static_cast<double>(targets.size());
    model.target_mean = std::accumulate(targets.begin(), targets.end(), 0.0) / n;
    double var = 0;
    for (double t : targets) var += (t - model.target_mean) * (t - model.target_mean);
    model.target_std = std::sqrt(var / n);
    if (model.target_std < 1e-12) model.target_std = 1e-12; // degenerate targets
    std::vector<double> tn(targets.size());
    for (size_t i = 0; i < targets.size(); ++i)
        tn[i] = (targets[i] - model.target_mean) / model.target_std;

    Gradients grads(model.in_dim);
    const size_t n_params =
        model.w1.size() + model.b1.size() + model.w2.size() + model.b2.size() +
        model.w_out.size() + 1;
    Adam adam(n_params);
    Activations act;

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        grads.zero();
        double loss = 0;
        for (size_t gi = 0; gi < graphs.size(); ++gi) {
            forward_graph(model, graphs[gi], act);
            const double err = act.y_norm - tn[gi];
            loss += err * err;
            backward_graph(model, graphs[gi], act, tn[gi], 1.0 / n, grads);
        }
        model.loss_trace.push_back(loss / n);
        adam.step(params.learning_rate,
                  {model.w1.data(), model.b1.data(), model.w2.data(), model.b2.data(),
                   model.w_out.data(), &model.b_out},
                  {grads.w1.data(), grads.b1.data(), grads.w2.data(), grads.b2.data(),
                   grads.w_out.data(), &grads.b_out},
                  {model.w1.size(), model.b1.size(), model.w2.size(), model.b2.size(),
                   model.w_out.size(), 1});
    }
    return model;
}

double gcn_gradcheck(const GcnModel& model, const GraphTensors& g, double target,
                     int n_samples, bool corrupt_w2_sign) {
    GcnModel m = model;
    const double tn = (target - m.target_mean) / m.target_std;

    Gradients grads(m.in_dim);
    Activations act;
    forward_graph(m, g, act);
    backward_graph(m, g, act, tn, 1.0, grads, corrupt_w2_sign);

    struct Slot {
        double* param;
        const double* grad;
        size_t size;
    };
    std::vector<Slot> slots = {
        {m.w1.data(), grads.w1.data(), m.w1.size()},
        {m.b1.data(), grads.b1.data(), m.b1.size()},
        {m.w2.data(), grads.w2.data(), m.w2.size()},
        {m.b2.data(), grads.b2.data(), m.b2.size()},
        {m.w_out.data(), grads.w_out.data(), m.w_out.size()},
        {&m.b_out, &grads.b_out, 1},
    };
    size_t total = 0;
    for (const auto& s : slots) total += s.size;

    Rng rng(0x9DC4E);
    const double h = 1e-5;
    double max_rel = 0;
    for (int s = 0; s < n_samples; ++s) {
        size_t pick = rng.below(total);
        double* p = nullptr;
        const double* gref = nullptr;
        for (const auto& slot : slots) {
            if (pick < slot.size) {
                p = slot.param + pick;
                gref = slot.grad + pick;
                break;
            }
            pick -= slot.size;
        }
        const double orig = *p;
        auto loss_at = [&](double v) {
            *p = v;
            Activations a;
            forward_graph(m, g, a);
            const double e = a.y_norm - tn;
            return e * e;
        };
        const double numeric = (loss_at(orig + h) - loss_at(orig - h)) / (2 * h);
        *p = orig;
        const double rel =
            std::abs(numeric - *gref) / std::max(1e-8, std::abs(numeric) + std::abs(*gref));
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

} // namespace sogppa
