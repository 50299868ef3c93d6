// NEON variants (aarch64). Same accumulation order as the scalar reference;
// built with fp-contract off, so results are bit-identical.
#include "sogppa/kernels.hpp"

#include <cstring>
#include <arm_neon.h>

namespace sogppa {

namespace {

void v_matmul_nn(const double* a, const double* b, double* c, int n, int k, int m,
                 bool accumulate) {
    if (!accumulate) std::memset(c, 0, sizeof(double) * static_cast<size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        double* crow = c + static_cast<size_t>(i) * m;
        for (int l = 0; l < k; ++l) {
            const float64x2_t av = vdupq_n_f64(arow[l]);
            const double* brow = b + static_cast<size_t>(l) * m;
            int j = 0;
            for (; j + 2 <= m; j += 2) {
                float64x2_t cj = vld1q_f64(crow + j);
                cj = vaddq_f64(cj, vmulq_f64(av, vld1q_f64(brow + j)));
                vst1q_f64(crow + j, cj);
            }
            for (; j < m; ++j) crow[j] += arow[l] * brow[j];
        }
    }
}

void v_matmul_tn(const double* a, const double* b, double* c, int n, int k, int m,
                 bool accumulate) {
    if (!accumulate) std::memset(c, 0, sizeof(double) * static_cast<size_t>(k) * m);
    for (int i = 0; i < n; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        const double* brow = b + static_cast<size_t>(i) * m;
        for (int l = 0; l < k; ++l) {
            const float64x2_t av = vdupq_n_f64(arow[l]);
            double* crow = c + static_cast<size_t>(l) * m;
            int j = 0;
            for (; j + 2 <= m; j += 2) {
                float64x2_t cj = vld1q_f64(crow + j);
                cj = vaddq_f64(cj, vmulq_f64(av, vld1q_f64(brow + j)));
                vst1q_f64(crow + j, cj);
            }
            for (; j < m; ++j) crow[j] += arow[l] * brow[j];
        }
    }
}

void v_matmul_nt(const double* a, const double* b, double* c, int n, int m, int k,
                 bool accumulate) {
    for (int i = 0; i < n; ++i) {
        const double* arow = a + static_cast<size_t>(i) * m;
        for (int l = 0; l < k; ++l) {
            const double* brow = b + static_cast<size_t>(l) * m;
            // two vector accumulators emulate the four scalar partial sums:
            // acc01 holds lanes s0,s1 and acc23 holds s2,s3
            float64x2_t acc01 = vdupq_n_f64(0), acc23 = vdupq_n_f64(0);
            int j = 0;
            for (; j + 4 <= m; j += 4) {
                acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(arow + j), vld1q_f64(brow + j)));
                acc23 = vaddq_f64(acc23,
                                  vmulq_f64(vld1q_f64(arow + j + 2), vld1q_f64(brow + j + 2)));
            }
            double s[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                           vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
            if (j < m) s[0] += arow[j] * brow[j];
            if (j + 1 < m) s[1] += arow[j + 1] * brow[j + 1];
            if (j + 2 < m) s[2] += arow[j + 2] * brow[j + 2];
            const double dot = (s[0] + s[1]) + (s[2] + s[3]);
            double* dst = c + static_cast<size_t>(i) * k + l;
            *dst = accumulate ? *dst + dot : dot;
        }
    }
}

void v_spmm(const int* rowptr, const int* col, const double* val, const double* x,
            double* y, int n, int m) {
    std::memset(y, 0, sizeof(double) * static_cast<size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        double* yrow = y + static_cast<size_t>(i) * m;
        for (int e = rowptr[i]; e < rowptr[i + 1]; ++e) {
            const float64x2_t v = vdupq_n_f64(val[e]);
            const double* xrow = x + static_cast<size_t>(col[e]) * m;
            int j = 0;
            for (; j + 2 <= m; j += 2) {
                float64x2_t yj = vld1q_f64(yrow + j);
                yj = vaddq_f64(yj, vmulq_f64(v, vld1q_f64(xrow + j)));
                vst1q_f64(yrow + j, yj);
            }
            for (; j < m; ++j) yrow[j] += val[e] * xrow[j];
        }
    }
}

void v_relu(double* x, int n) {
    const float64x2_t zero = vdupq_n_f64(0);
    int i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmaxq_f64(vld1q_f64(x + i), zero));
    for (; i < n; ++i) x[i] = x[i] > 0 ? x[i] : 0;
}

void v_relu_mask(const double* pre, double* grad, int n) {
    for (int i = 0; i < n; ++i)
        if (!(pre[i] > 0)) grad[i] = 0;
}

void v_add_row(double* x, const double* b, int n, int m) {
    for (int i = 0; i < n; ++i) {
        double* row = x + static_cast<size_t>(i) * m;
        int j = 0;
        for (; j + 2 <= m; j += 2)
            vst1q_f64(row + j, vaddq_f64(vld1q_f64(row + j), vld1q_f64(b + j)));
        for (; j < m; ++j) row[j] += b[j];
    }
}

void v_col_sum(const double* x, double* out, int n, int m) {
    std::memset(out, 0, sizeof(double) * static_cast<size_t>(m));
    for (int i = 0; i < n; ++i) {
        const double* row = x + static_cast<size_t>(i) * m;
        int j = 0;
        for (; j + 2 <= m; j += 2)
            vst1q_f64(out + j, vaddq_f64(vld1q_f64(out + j), vld1q_f64(row + j)));
        for (; j < m; ++j) out[j] += row[j];
    }
}

void v_axpy(double a, const double* x, double* y, int n) {
    const float64x2_t av = vdupq_n_f64(a);
    int i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t yi = vld1q_f64(y + i);
        yi = vaddq_f64(yi, vmulq_f64(av, vld1q_f64(x + i)));
        vst1q_f64(y + i, yi);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

const KernelOps kNeon{
    "neon",    v_matmul_nn, v_matmul_tn, v_matmul_nt, v_spmm,
    v_relu,    v_relu_mask, v_add_row,   v_col_sum,   v_axpy,
};

} // namespace

const KernelOps* neon_kernels() { return &kNeon; }

} // namespace sogppa
