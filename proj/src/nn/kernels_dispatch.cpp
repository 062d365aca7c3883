#include <cstdlib>
#include <string_view>

#include "arm/nn/kernels.hpp"

namespace arm::kernels {

#if defined(ARM_HAVE_AVX2_KERNELS)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(ARM_HAVE_AVX2_KERNELS)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* forced = std::getenv("ARM_KERNELS");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
    if (const KernelTable* simd = avx2_kernels()) return *simd;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace arm::kernels
