#include "engine.hpp"

namespace cascade::engine {

bool avx2_available() {
#if defined(CASCADE_HAVE_AVX2_KERNEL) && defined(__x86_64__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

KernelFn select_kernel(SimdMode mode) {
#if defined(CASCADE_HAVE_AVX2_KERNEL)
  if (mode == SimdMode::Avx2 || (mode == SimdMode::Auto && avx2_available()))
    return &run_trials_avx2;
#else
  (void)mode;
#endif
  return &run_trials_scalar;
}

}  // namespace cascade::engine
