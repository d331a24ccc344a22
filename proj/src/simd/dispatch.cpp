#include <cstdlib>
#include <string_view>

#include "revmc/simd/kernels.hpp"

namespace revmc::simd {

std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

bool cpu_supports(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
      return avx2_kernels() != nullptr && __builtin_cpu_supports("avx2") &&
             __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
      // Advanced SIMD is mandatory on AArch64.
      return neon_kernels() != nullptr;
  }
  return false;
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (cpu_supports(Backend::Avx2)) out.push_back(avx2_kernels());
  if (cpu_supports(Backend::Neon)) out.push_back(neon_kernels());
  return out;
}

namespace {

const KernelTable& select() noexcept {
  if (const char* env = std::getenv("REVMC_SIMD")) {
    const std::string_view want(env);
    if (want == "scalar") return scalar_kernels();
    if (want == "avx2" && cpu_supports(Backend::Avx2)) return *avx2_kernels();
    if (want == "neon" && cpu_supports(Backend::Neon)) return *neon_kernels();
  }
  if (cpu_supports(Backend::Avx2)) return *avx2_kernels();
  if (cpu_supports(Backend::Neon)) return *neon_kernels();
  return scalar_kernels();
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace revmc::simd
