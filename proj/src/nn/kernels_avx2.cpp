// Compiled with -mavx2 -mfma; only reached through the dispatch table after a
// CPUID check.
#include <immintrin.h>

#include "arm/nn/kernels.hpp"

namespace arm::kernels {
namespace {

struct F32x8 {
  using scalar = float;
  using reg = __m256;
  static constexpr int lanes = 8;
  static reg zero() { return _mm256_setzero_ps(); }
  static reg load(const float* p) { return _mm256_loadu_ps(p); }
  static void store(float* p, reg v) { _mm256_storeu_ps(p, v); }
  static reg set1(float v) { return _mm256_set1_ps(v); }
  static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_ps(a, b, c); }
  static reg add(reg a, reg b) { return _mm256_add_ps(a, b); }
  static float hsum(reg v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    __m128 shuf = _mm_movehdup_ps(lo);
    __m128 sums = _mm_add_ps(lo, shuf);
    shuf = _mm_movehl_ps(shuf, sums);
    sums = _mm_add_ss(sums, shuf);
    return _mm_cvtss_f32(sums);
  }
};

struct F64x4 {
  using scalar = double;
  using reg = __m256d;
  static constexpr int lanes = 4;
  static reg zero() { return _mm256_setzero_pd(); }
  static reg load(const double* p) { return _mm256_loadu_pd(p); }
  static void store(double* p, reg v) { _mm256_storeu_pd(p, v); }
  static reg set1(double v) { return _mm256_set1_pd(v); }
  static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_pd(a, b, c); }
  static reg add(reg a, reg b) { return _mm256_add_pd(a, b); }
  static double hsum(reg v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d high64 = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, high64));
  }
};

// Register-blocked micro-kernel: 4 rows of A times two vector widths of B.
template <class V>
void gemm_block(int m, int n, int k, const typename V::scalar* a, std::ptrdiff_t a_row,
               std::ptrdiff_t a_col, const typename V::scalar* b, std::ptrdiff_t ldb,
               typename V::scalar* c, std::ptrdiff_t ldc) {
  using T = typename V::scalar;
  using R = typename V::reg;
  constexpr int W = V::lanes;
  int j = 0;
  for (; j + 2 * W <= n; j += 2 * W) {
    int i = 0;
    for (; i + 4 <= m; i += 4) {
      R c00 = V::zero(), c01 = V::zero(), c10 = V::zero(), c11 = V::zero();
      R c20 = V::zero(), c21 = V::zero(), c30 = V::zero(), c31 = V::zero();
      const T* a0 = a + i * a_row;
      const T* a1 = a0 + a_row;
      const T* a2 = a1 + a_row;
      const T* a3 = a2 + a_row;
      for (int p = 0; p < k; ++p) {
        const T* bp = b + p * ldb + j;
        const R b0 = V::load(bp);
        const R b1 = V::load(bp + W);
        const std::ptrdiff_t off = p * a_col;
        R av = V::set1(a0[off]);
        c00 = V::fmadd(av, b0, c00);
        c01 = V::fmadd(av, b1, c01);
        av = V::set1(a1[off]);
        c10 = V::fmadd(av, b0, c10);
        c11 = V::fmadd(av, b1, c11);
        av = V::set1(a2[off]);
        c20 = V::fmadd(av, b0, c20);
        c21 = V::fmadd(av, b1, c21);
        av = V::set1(a3[off]);
        c30 = V::fmadd(av, b0, c30);
        c31 = V::fmadd(av, b1, c31);
      }
      T* cr = c + i * ldc + j;
      V::store(cr, V::add(V::load(cr), c00));
      V::store(cr + W, V::add(V::load(cr + W), c01));
      cr += ldc;
      V::store(cr, V::add(V::load(cr), c10));
      V::store(cr + W, V::add(V::load(cr + W), c11));
      cr += ldc;
      V::store(cr, V::add(V::load(cr), c20));
      V::store(cr + W, V::add(V::load(cr + W), c21));
      cr += ldc;
      V::store(cr, V::add(V::load(cr), c30));
      V::store(cr + W, V::add(V::load(cr + W), c31));
    }
    for (; i < m; ++i) {
      R acc0 = V::zero(), acc1 = V::zero();
      const T* ai = a + i * a_row;
      for (int p = 0; p < k; ++p) {
        const T* bp = b + p * ldb + j;
        const R av = V::set1(ai[p * a_col]);
        acc0 = V::fmadd(av, V::load(bp), acc0);
        acc1 = V::fmadd(av, V::load(bp + W), acc1);
      }
      T* cr = c + i * ldc + j;
      V::store(cr, V::add(V::load(cr), acc0));
      V::store(cr + W, V::add(V::load(cr + W), acc1));
    }
  }
  for (; j + W <= n; j += W) {
    for (int i = 0; i < m; ++i) {
      R acc = V::zero();
      const T* ai = a + i * a_row;
      for (int p = 0; p < k; ++p) acc = V::fmadd(V::set1(ai[p * a_col]), V::load(b + p * ldb + j), acc);
      T* cr = c + i * ldc + j;
      V::store(cr, V::add(V::load(cr), acc));
    }
  }
  if (j < n) {
    for (int i = 0; i < m; ++i) {
      const T* ai = a + i * a_row;
      T* cr = c + i * ldc;
      for (int p = 0; p < k; ++p) {
        const T av = ai[p * a_col];
        const T* bp = b + p * ldb;
        for (int jj = j; jj < n; ++jj) cr[jj] += av * bp[jj];
      }
    }
  }
}

// Panels of B sized to stay cache resident across the row blocks of A.
template <class V>
void gemm_simd(int m, int n, int k, const typename V::scalar* a, std::ptrdiff_t a_row,
               std::ptrdiff_t a_col, const typename V::scalar* b, std::ptrdiff_t ldb,
               typename V::scalar* c, std::ptrdiff_t ldc) {
  constexpr int kPanelCols = 512;
  constexpr int kPanelDepth = 256;
  for (int j0 = 0; j0 < n; j0 += kPanelCols) {
    const int nb = n - j0 < kPanelCols ? n - j0 : kPanelCols;
    for (int p0 = 0; p0 < k; p0 += kPanelDepth) {
      const int kb = k - p0 < kPanelDepth ? k - p0 : kPanelDepth;
      gemm_block<V>(m, nb, kb, a + p0 * a_col, a_row, a_col, b + p0 * ldb + j0, ldb, c + j0, ldc);
    }
  }
}

template <class V>
typename V::scalar dot_simd(std::size_t n, const typename V::scalar* x, const typename V::scalar* y) {
  using T = typename V::scalar;
  constexpr std::size_t W = V::lanes;
  auto acc0 = V::zero(), acc1 = V::zero();
  std::size_t i = 0;
  for (; i + 2 * W <= n; i += 2 * W) {
    acc0 = V::fmadd(V::load(x + i), V::load(y + i), acc0);
    acc1 = V::fmadd(V::load(x + i + W), V::load(y + i + W), acc1);
  }
  for (; i + W <= n; i += W) acc0 = V::fmadd(V::load(x + i), V::load(y + i), acc0);
  T acc = V::hsum(V::add(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

// 2x4 blocked dot products along the shared k dimension.
template <class V>
void gemm_nt_simd(int m, int n, int k, const typename V::scalar* a, std::ptrdiff_t lda,
                  const typename V::scalar* b, std::ptrdiff_t ldb, typename V::scalar* c,
                  std::ptrdiff_t ldc) {
  using T = typename V::scalar;
  using R = typename V::reg;
  constexpr int W = V::lanes;
  int i = 0;
  for (; i + 2 <= m; i += 2) {
    const T* a0 = a + i * lda;
    const T* a1 = a0 + lda;
    int j = 0;
    for (; j + 4 <= n; j += 4) {
      const T* bj[4] = {b + j * ldb, b + (j + 1) * ldb, b + (j + 2) * ldb, b + (j + 3) * ldb};
      R s0[4] = {V::zero(), V::zero(), V::zero(), V::zero()};
      R s1[4] = {V::zero(), V::zero(), V::zero(), V::zero()};
      int p = 0;
      for (; p + W <= k; p += W) {
        const R x0 = V::load(a0 + p), x1 = V::load(a1 + p);
        for (int q = 0; q < 4; ++q) {
          const R y = V::load(bj[q] + p);
          s0[q] = V::fmadd(x0, y, s0[q]);
          s1[q] = V::fmadd(x1, y, s1[q]);
        }
      }
      for (int q = 0; q < 4; ++q) {
        T t0 = V::hsum(s0[q]), t1 = V::hsum(s1[q]);
        for (int pp = p; pp < k; ++pp) {
          t0 += a0[pp] * bj[q][pp];
          t1 += a1[pp] * bj[q][pp];
        }
        c[i * ldc + j + q] += t0;
        c[(i + 1) * ldc + j + q] += t1;
      }
    }
    for (; j < n; ++j) {
      const T* b0 = b + j * ldb;
      c[i * ldc + j] += dot_simd<V>(k, a0, b0);
      c[(i + 1) * ldc + j] += dot_simd<V>(k, a1, b0);
    }
  }
  for (; i < m; ++i) {
    for (int j = 0; j < n; ++j) c[i * ldc + j] += dot_simd<V>(k, a + i * lda, b + j * ldb);
  }
}

template <class V>
void axpy_simd(std::size_t n, typename V::scalar alpha, const typename V::scalar* x,
               typename V::scalar* y) {
  constexpr std::size_t W = V::lanes;
  const auto av = V::set1(alpha);
  std::size_t i = 0;
  for (; i + W <= n; i += W) V::store(y + i, V::fmadd(av, V::load(x + i), V::load(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{
      "avx2",
      gemm_simd<F32x8>,
      gemm_simd<F64x4>,
      gemm_nt_simd<F32x8>,
      gemm_nt_simd<F64x4>,
      axpy_simd<F32x8>,
      axpy_simd<F64x4>,
      dot_simd<F32x8>,
      dot_simd<F64x4>,
  };
  return table;
}

}  // namespace arm::kernels
