#include "arm/nn/kernels.hpp"

namespace arm::kernels {
namespace {

template <class T>
void gemm_ref(int m, int n, int k, const T* a, std::ptrdiff_t a_row, std::ptrdiff_t a_col,
              const T* b, std::ptrdiff_t ldb, T* c, std::ptrdiff_t ldc) {
  for (int i = 0; i < m; ++i) {
    T* crow = c + i * ldc;
    for (int p = 0; p < k; ++p) {
      const T av = a[i * a_row + p * a_col];
      if (av == T(0)) continue;
      const T* brow = b + p * ldb;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <class T>
void gemm_nt_ref(int m, int n, int k, const T* a, std::ptrdiff_t lda, const T* b,
                 std::ptrdiff_t ldb, T* c, std::ptrdiff_t ldc) {
  for (int i = 0; i < m; ++i) {
    const T* arow = a + i * lda;
    for (int j = 0; j < n; ++j) {
      const T* brow = b + j * ldb;
      T acc = 0;
      for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
      c[i * ldc + j] += acc;
    }
  }
}

template <class T>
void axpy_ref(std::size_t n, T alpha, const T* x, T* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <class T>
T dot_ref(std::size_t n, const T* x, const T* y) {
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar",         gemm_ref<float>,   gemm_ref<double>, gemm_nt_ref<float>,
      gemm_nt_ref<double>, axpy_ref<float>, axpy_ref<double>, dot_ref<float>,
      dot_ref<double>,
  };
  return table;
}

}  // namespace arm::kernels
