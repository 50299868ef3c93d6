// AVX2 variants. Accumulation order matches the scalar reference exactly
// (j-vectorized broadcast loops; four-lane partial sums for the nt case) and
// this TU is built with -ffp-contract=off, so results are bit-identical to
// the scalar kernels.
#include "sogppa/kernels.hpp"

#include <cstring>
#include <immintrin.h>

namespace sogppa {

namespace {

void v_matmul_nn(const double* a, const double* b, double* c, int n, int k, int m,
                 bool accumulate) {
    if (!accumulate) std::memset(c, 0, sizeof(double) * static_cast<size_t>(n) * m);
    for (int i = 0; i < n; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        double* crow = c + static_cast<size_t>(i) * m;
        for (int l = 0; l < k; ++l) {
            const __m256d av = _mm256_set1_pd(arow[l]);
            const double* brow = b + static_cast<size_t>(l) * m;
            int j = 0;
            for (; j + 4 <= m; j += 4) {
                __m256d cj = _mm256_loadu_pd(crow + j);
                cj = _mm256_add_pd(cj, _mm256_mul_pd(av, _mm256_loadu_pd(brow + j)));
                _mm256_storeu_pd(crow + j, cj);
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
            const __m256d av = _mm256_set1_pd(arow[l]);
            double* crow = c + static_cast<size_t>(l) * m;
            int j = 0;
            for (; j + 4 <= m; j += 4) {
                __m256d cj = _mm256_loadu_pd(crow + j);
                cj = _mm256_add_pd(cj, _mm256_mul_pd(av, _mm256_loadu_pd(brow + j)));
                _mm256_storeu_pd(crow + j, cj);
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
            __m256d acc = _mm256_setzero_pd(); // lane q holds scalar partial sum s_q
            int j = 0;
            for (; j + 4 <= m; j += 4)
                acc = _mm256_add_pd(
                    acc, _mm256_mul_pd(_mm256_loadu_pd(arow + j), _mm256_loadu_pd(brow + j)));
            alignas(32) double s[4];
            _mm256_store_pd(s, acc);
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
            const __m256d v = _mm256_set1_pd(val[e]);
            const double* xrow = x + static_cast<size_t>(col[e]) * m;
            int j = 0;
            for (; j + 4 <= m; j += 4) {
                __m256d yj = _mm256_loadu_pd(yrow + j);
                yj = _mm256_add_pd(yj, _mm256_mul_pd(v, _mm256_loadu_pd(xrow + j)));
                _mm256_storeu_pd(yrow + j, yj);
            }
            for (; j < m; ++j) yrow[j] += val[e] * xrow[j];
        }
    }
}

void v_relu(double* x, int n) {
    const __m256d zero = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    for (; i < n; ++i) x[i] = x[i] > 0 ? x[i] : 0;
}

void v_relu_mask(const double* pre, double* grad, int n) {
    const __m256d zero = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(grad + i, _mm256_and_pd(_mm256_loadu_pd(grad + i), mask));
    }
    for (; i < n; ++i)
        if (!(pre[i] > 0)) grad[i] = 0;
}

void v_add_row(double* x, const double* b, int n, int m) {
    for (int i = 0; i < n; ++i) {
        double* row = x + static_cast<size_t>(i) * m;
        int j = 0;
        for (; j + 4 <= m; j += 4)
            _mm256_storeu_pd(row + j,
                             _mm256_add_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(b + j)));
        for (; j < m; ++j) row[j] += b[j];
    }
}

void v_col_sum(const double* x, double* out, int n, int m) {
    std::memset(out, 0, sizeof(double) * static_cast<size_t>(m));
    for (int i = 0; i < n; ++i) {
        const double* row = x + static_cast<size_t>(i) * m;
        int j = 0;
        for (; j + 4 <= m; j += 4)
            _mm256_storeu_pd(out + j,
                             _mm256_add_pd(_mm256_loadu_pd(out + j), _mm256_loadu_pd(row + j)));
        for (; j < m; ++j) out[j] += row[j];
    }
}

void v_axpy(double a, const double* x, double* y, int n) {
    const __m256d av = _mm256_set1_pd(a);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yi = _mm256_loadu_pd(y + i);
        yi = _mm256_add_pd(yi, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, yi);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

const KernelOps kAvx2{
    "avx2",    v_matmul_nn, v_matmul_tn, v_matmul_nt, v_spmm,
    v_relu,    v_relu_mask, v_add_row,   v_col_sum,   v_axpy,
};

} // namespace

const KernelOps* avx2_kernels() {
    return __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr;
}

} // namespace sogppa
