#include "sogppa/activity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sogppa/rng.hpp"

namespace sogppa {

ActivityMap propagate(const SogGraph& graph, double input_p) {
    const size_t n = graph.nodes.size();
    ActivityMap am;
    am.p.assign(n, 0.5);
    am.alpha.assign(n, 0.0);

    const int max_iter = 100;
    const double tol = 1e-9;
    double residual = 0;
    for (int iter = 0; iter < max_iter; ++iter) {
        residual = 0;
        for (size_t i = 0; i < n; ++i) {
            const auto& nd = graph.nodes[i];
            auto pf = [&](int f) { return am.p[f]; };
            double p = am.p[i];
            switch (nd.kind) {
            case SogKind::PI: p = input_p; break;
            case SogKind::Const0: p = 0; break;
            case SogKind::Const1: p = 1; break;
            case SogKind::Not: p = 1 - pf(nd.fanin[0]); break;
            case SogKind::And2: p = pf(nd.fanin[0]) * pf(nd.fanin[1]); break;
            case SogKind::Or2: {
                double a = pf(nd.fanin[0]), b = pf(nd.fanin[1]);
                p = a + b - a * b;
                break;
            }
            case SogKind::Xor2: {
                double a = pf(nd.fanin[0]), b = pf(nd.fanin[1]);
                p = a + b - 2 * a * b;
                break;
            }
            case SogKind::Mux2: {
                double s = pf(nd.fanin[0]);
                p = s * pf(nd.fanin[1]) + (1 - s) * pf(nd.fanin[2]);
                break;
            }
            case SogKind::PO: p = pf(nd.fanin[0]); break;
            case SogKind::Dff: p = pf(nd.fanin[0]); break; // steady state
            }
            residual = std::max(residual, std::abs(p - am.p[i]));
            am.p[i] = p;
        }
        if (residual < tol) break;
    }
    if (residual >= tol)
        throw std::runtime_error("activity propagation did not converge, residual " +
                                 std::to_string(residual));

    for (size_t i = 0; i < n; ++i) {
        const auto& nd = graph.nodes[i];
        if (nd.kind == SogKind::Const0 || nd.kind == SogKind::Const1)
            am.alpha[i] = 0;
        else
            am.alpha[i] = 2 * am.p[i] * (1 - am.p[i]);
    }
    return am;
}

ActivityMap simulate_activity(const SogGraph& graph, int64_t n_cycles, uint64_t seed) {
    if (n_cycles < 1) throw std::runtime_error("n_cycles must be >= 1");
    const size_t n = graph.nodes.size();
    ActivityMap am;
    am.p.assign(n, 0.0);
    am.alpha.assign(n, 0.0);

    Rng rng(derive_seed(seed, 0xAC71));
    PackedSim sim(graph);

    std::vector<int> pis;
    for (size_t i = 0; i < n; ++i)
        if (graph.nodes[i].kind == SogKind::PI) pis.push_back(static_cast<int>(i));

    std::vector<uint64_t> prev(n, 0);
    std::vector<int64_t> ones(n, 0), toggles(n, 0);
    for (int64_t cyc = 0; cyc < n_cycles; ++cyc) {
        std::map<int, uint64_t> pi_vals;
        for (int pi : pis) pi_vals[pi] = rng.flip() ? 1 : 0;
        sim.step(pi_vals);
        for (size_t i = 0; i < n; ++i) {
            uint64_t v = sim.value(i) & 1;
            ones[i] += static_cast<int64_t>(v);
            if (cyc > 0 && v != prev[i]) ++toggles[i];
            prev[i] = v;
        }
    }
    for (size_t i = 0; i < n; ++i) {
        am.p[i] = static_cast<double>(ones[i]) / static_cast<double>(n_cycles);
        am.alpha[i] = n_cycles > 1 ? static_cast<double>(toggles[i]) /
                                         static_cast<double>(n_cycles - 1)
                                   : 0.0;
    }
    return am;
}

} // namespace sogppa
