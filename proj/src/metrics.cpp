#include "sogppa/metrics.hpp"

#include <cmath>

namespace sogppa {

TargetMetrics compute_metrics(const std::vector<double>& prediction,
                              const std::vector<double>& truth) {
    if (prediction.size() != truth.size()) throw MetricsError("series length mismatch");
    const size_t n = truth.size();
    if (n < 2) throw MetricsError("need at least 2 samples");

    TargetMetrics m;

    double mean_p = 0, mean_t = 0;
    for (size_t i = 0; i < n; ++i) {
        mean_p += prediction[i];
        mean_t += truth[i];
    }
    mean_p /= static_cast<double>(n);
    mean_t /= static_cast<double>(n);

    double cov = 0, var_p = 0, var_t = 0, sq_err = 0, mape = 0;
    for (size_t i = 0; i < n; ++i) {
        const double dp = prediction[i] - mean_p;
        const double dt = truth[i] - mean_t;
        cov += dp * dt;
        var_p += dp * dp;
        var_t += dt * dt;
        const double e = prediction[i] - truth[i];
        sq_err += e * e;
        if (std::abs(truth[i]) >= 1e-9) {
            mape += std::abs(e) / std::abs(truth[i]);
            ++m.n_used;
        } else {
            ++m.n_excluded;
        }
    }

    if (var_p == 0 || var_t == 0) {
        m.r_defined = false;
        m.r = 0.0;
    } else {
        m.r = cov / std::sqrt(var_p * var_t);
        if (m.r > 1.0) m.r = 1.0;
        if (m.r < -1.0) m.r = -1.0;
    }

    if (m.n_used == 0) throw MetricsError("all samples excluded from MAPE");
    m.mape_percent = 100.0 * mape / static_cast<double>(m.n_used);

    if (var_t == 0) throw MetricsError("constant truth series: RRSE undefined");
    m.rrse = std::sqrt(sq_err / var_t);
    return m;
}

} // namespace sogppa
