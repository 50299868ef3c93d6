#pragma once

namespace sogppa {

// Dense/sparse double-precision kernels behind the GCN. Scalar is the
// reference; the AVX2 (x86) and NEON (arm64) variants use the exact same
// accumulation order and are compiled with fp-contract off, so all variants
// produce bit-identical results. The active variant is picked once at
// runtime from CPU capabilities.
//
// Matrices are dense row-major. The sparse input is CSR.
struct KernelOps {
    const char* name;

    // C[n x m] = (accumulate ? C : 0) + A[n x k] * B[k x m]
    void (*matmul_nn)(const double* a, const double* b, double* c, int n, int k, int m,
                      bool accumulate);
    // C[k x m] = (accumulate ? C : 0) + A[n x k]^T * B[n x m]
    void (*matmul_tn)(const double* a, const double* b, double* c, int n, int k, int m,
                      bool accumulate);
    // C[n x k] = (accumulate ? C : 0) + A[n x m] * B[k x m]^T
    void (*matmul_nt)(const double* a, const double* b, double* c, int n, int m, int k,
                      bool accumulate);
    // Y[n x m] = S[n x n] * X[n x m], S in CSR form
    void (*spmm)(const int* rowptr, const int* col, const double* val, const double* x,
                 double* y, int n, int m);
    void (*relu)(double* x, int n);
    // grad[i] = pre[i] > 0 ? grad[i] : 0
    void (*relu_mask)(const double* pre, double* grad, int n);
    // add bias row b[m] to every row of X[n x m]
    void (*add_row)(double* x, const double* b, int n, int m);
    // out[m] = column sums of X[n x m]
    void (*col_sum)(const double* x, double* out, int n, int m);
    void (*axpy)(double a, const double* x, double* y, int n);
};

const KernelOps& scalar_kernels();
const KernelOps* avx2_kernels(); // nullptr when not compiled in / unsupported
const KernelOps* neon_kernels();

const KernelOps& active_kernels();
// Override selection (tests and the --kernels CLI flag); nullptr restores auto.
void force_kernels(const KernelOps* ops);

} // namespace sogppa
