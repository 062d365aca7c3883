#pragma once

// Dense linear-algebra kernels behind convolution and dense layers.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2+FMA variant compiled in its own translation unit. The variant is
// picked once at startup from CPUID; setting ARM_KERNELS=scalar in the
// environment forces the reference path.

#include <cstddef>

namespace arm::kernels {

/// C[m,n] += A[m,k] * B[k,n]. A is addressed as a[i * a_row + p * a_col] so the
/// same kernel serves both A and A^T; B and C are row-major.
template <class T>
using GemmFn = void (*)(int m, int n, int k, const T* a, std::ptrdiff_t a_row, std::ptrdiff_t a_col,
                        const T* b, std::ptrdiff_t ldb, T* c, std::ptrdiff_t ldc);

/// C[m,n] += A[m,k] * B[n,k]^T, all row-major.
template <class T>
using GemmNtFn = void (*)(int m, int n, int k, const T* a, std::ptrdiff_t lda, const T* b,
                          std::ptrdiff_t ldb, T* c, std::ptrdiff_t ldc);

template <class T>
using AxpyFn = void (*)(std::size_t n, T alpha, const T* x, T* y);

template <class T>
using DotFn = T (*)(std::size_t n, const T* x, const T* y);

struct KernelTable {
  const char* name;
  GemmFn<float> gemm_f32;
  GemmFn<double> gemm_f64;
  GemmNtFn<float> gemm_nt_f32;
  GemmNtFn<double> gemm_nt_f64;
  AxpyFn<float> axpy_f32;
  AxpyFn<double> axpy_f64;
  DotFn<float> dot_f32;
  DotFn<double> dot_f64;
};

const KernelTable& scalar_kernels();

/// nullptr when the build or the running CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

const KernelTable& active_kernels();

inline void gemm(int m, int n, int k, const float* a, std::ptrdiff_t a_row, std::ptrdiff_t a_col,
                 const float* b, std::ptrdiff_t ldb, float* c, std::ptrdiff_t ldc) {
  active_kernels().gemm_f32(m, n, k, a, a_row, a_col, b, ldb, c, ldc);
}
inline void gemm(int m, int n, int k, const double* a, std::ptrdiff_t a_row, std::ptrdiff_t a_col,
                 const double* b, std::ptrdiff_t ldb, double* c, std::ptrdiff_t ldc) {
  active_kernels().gemm_f64(m, n, k, a, a_row, a_col, b, ldb, c, ldc);
}
inline void gemm_nt(int m, int n, int k, const float* a, std::ptrdiff_t lda, const float* b,
                    std::ptrdiff_t ldb, float* c, std::ptrdiff_t ldc) {
  active_kernels().gemm_nt_f32(m, n, k, a, lda, b, ldb, c, ldc);
}
inline void gemm_nt(int m, int n, int k, const double* a, std::ptrdiff_t lda, const double* b,
                    std::ptrdiff_t ldb, double* c, std::ptrdiff_t ldc) {
  active_kernels().gemm_nt_f64(m, n, k, a, lda, b, ldb, c, ldc);
}
inline void axpy(std::size_t n, float alpha, const float* x, float* y) {
  active_kernels().axpy_f32(n, alpha, x, y);
}
inline void axpy(std::size_t n, double alpha, const double* x, double* y) {
  active_kernels().axpy_f64(n, alpha, x, y);
}
inline float dot(std::size_t n, const float* x, const float* y) {
  return active_kernels().dot_f32(n, x, y);
}
inline double dot(std::size_t n, const double* x, const double* y) {
  return active_kernels().dot_f64(n, x, y);
}

}  // namespace arm::kernels
