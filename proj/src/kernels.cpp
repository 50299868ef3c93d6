#include "sogppa/kernels.hpp"

#include <atomic>
#include <cstring>

namespace sogppa {

namespace {

void s_matmul_nn(const double* a, const double* b, double* c, int n, int k, int m,
                 bool accumulate) {
    if (!accumulate) std::memset(c, 0, sizeof(double) * static_cast<size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        double* crow = c + static_cast<size_t>(i) * m;
        for (int l = 0; l < k; ++l) {
            const double av = arow[l];
            const double* brow = b + static_cast<size_t>(l) * m;
            for (int j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
}

void s_matmul_tn(const double* a, const double* b, double* c, int n, int k, int m,
                 bool accumulate) {
    if (!accumulate) std::memset(c, 0, sizeof(double) * static_cast<size_t>(k) * m);
    for (int i = 0; i < n; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        const double* brow = b + static_cast<size_t>(i) * m;
        for (int l = 0; l < k; ++l) {
            const double av = arow[l];
            double* crow = c + static_cast<size_t>(l) * m;
            for (int j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
}

void s_matmul_nt(const double* a, const double* b, double* c, int n, int m, int k,
                 bool accumulate) {
    for (int i = 0; i < n; ++i) {
        const double* arow = a + static_cast<size_t>(i) * m;
        for (int l = 0; l < k; ++l) {
            const double* brow = b + static_cast<size_t>(l) * m;
            // four-lane partial sums; the vector variants keep this exact order
            double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
            int j = 0;
            for (; j + 4 <= m; j += 4) {
                s0 += arow[j] * brow[j];
                s1 += arow[j + 1] * brow[j + 1];
                s2 += arow[j + 2] * brow[j + 2];
                s3 += arow[j + 3] * brow[j + 3];
            }
            if (j < m) s0 += arow[j] * brow[j];
            if (j + 1 < m) s1 += arow[j + 1] * brow[j + 1];
            if (j + 2 < m) s2 += arow[j + 2] * brow[j + 2];
            const double dot = (s0 + s1) + (s2 + s3);
            double* dst = c + static_cast<size_t>(i) * k + l;
            *dst = accumulate ? *dst + dot : dot;
        }
    }
}

void s_spmm(const int* rowptr, const int* col, const double* val, const double* x,
            double* y, int n, int m) {
    std::memset(y, 0, sizeof(double) * static_cast<size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        double* yrow = y + static_cast<size_t>(i) * m;
        for (int e = rowptr[i]; e < rowptr[i + 1]; ++e) {
            const double v = val[e];
            const double* xrow = x + static_cast<size_t>(col[e]) * m;
            for (int j = 0; j < m; ++j) yrow[j] += v * xrow[j];
        }
    }
}

void s_relu(double* x, int n) {
    // (x > 0) ? x : 0 matches vector max semantics for negative zero
    for (int i = 0; i < n; ++i) x[i] = x[i] > 0 ? x[i] : 0;
}

void s_relu_mask(const double* pre, double* grad, int n) {
    for (int i = 0; i < n; ++i)
        if (!(pre[i] > 0)) grad[i] = 0;
}

void s_add_row(double* x, const double* b, int n, int m) {
    for (int i = 0; i < n; ++i) {
        double* row = x + static_cast<size_t>(i) * m;
        for (int j = 0; j < m; ++j) row[j] += b[j];
    }
}

void s_col_sum(const double* x, double* out, int n, int m) {
    std::memset(out, 0, sizeof(double) * static_cast<size_t>(m));
    for (int i = 0; i < n; ++i) {
        const double* row = x + static_cast<size_t>(i) * m;
        for (int j = 0; j < m; ++j) out[j] += row[j];
    }
}

void s_axpy(double a, const double* x, double* y, int n) {
    for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

const KernelOps kScalar{
    "scalar",  s_matmul_nn, s_matmul_tn, s_matmul_nt, s_spmm,
    s_relu,    s_relu_mask, s_add_row,   s_col_sum,   s_axpy,
};

std::atomic<const KernelOps*> g_forced{nullptr};

} // namespace

const KernelOps& scalar_kernels() { return kScalar; }

#ifndef SOGPPA_HAVE_AVX2_TU
const KernelOps* avx2_kernels() { return nullptr; }
#endif
#ifndef SOGPPA_HAVE_NEON_TU
const KernelOps* neon_kernels() { return nullptr; }
#endif

const KernelOps& active_kernels() {
    if (const KernelOps* f = g_forced.load(std::memory_order_relaxed)) return *f;
    static const KernelOps* selected = [] {
        if (const KernelOps* k = avx2_kernels()) return k;
        if (const KernelOps* k = neon_kernels()) return k;
        return &kScalar;
    }();
    return *selected;
}

void force_kernels(const KernelOps* ops) { g_forced.store(ops, std::memory_order_relaxed); }

} // namespace sogppa
