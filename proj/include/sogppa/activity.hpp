#pragma once

#include <cstdint>
#include <vector>

#include "sogppa/sog.hpp"

namespace sogppa {

struct ActivityMap {
    std::vector<double> p;     // P(signal == 1), per node
    std::vector<double> alpha; // expected toggles per cycle, per node
};

// Static probability propagation under the spatial-independence model.
// alpha = 2p(1-p); sequential loops are resolved by fixed-point iteration
// (<= 100 iterations, tolerance 1e-9) starting from p = 0.5.
ActivityMap propagate(const SogGraph& graph, double input_p = 0.5);

// Monte-Carlo activity: drives inputs with independent fair bits each cycle,
// counts value changes between consecutive cycles. Deterministic in seed.
ActivityMap simulate_activity(const SogGraph& graph, int64_t n_cycles, uint64_t seed);

} // namespace sogppa
