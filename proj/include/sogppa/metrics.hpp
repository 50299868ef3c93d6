#pragma once

#include <stdexcept>
#include <vector>

namespace sogppa {

struct MetricsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TargetMetrics {
    double r = 0.0;
    bool r_defined = true; // false when either series is constant
    double mape_percent = 0.0;
    double rrse = 0.0;
    int n_used = 0;     // samples entering MAPE
    int n_excluded = 0; // |truth| < 1e-9, skipped for MAPE
};

// Pearson R, MAPE over |truth| >= 1e-9, RRSE = sqrt(sum sq err / sum sq dev).
// Throws when fewer than 2 samples or when every sample is MAPE-excluded.
TargetMetrics compute_metrics(const std::vector<double>& prediction,
                              const std::vector<double>& truth);

} // namespace sogppa
