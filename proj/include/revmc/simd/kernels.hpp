#pragma once

// Data-parallel inner loops used by the dense linear algebra. Each kernel has
// a scalar reference implementation and vectorized variants (AVX2+FMA on
// x86-64, NEON on AArch64). The variant is picked once per process from CPU
// capabilities; REVMC_SIMD=scalar in the environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace revmc::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view to_string(Backend b) noexcept;

struct KernelTable {
  Backend backend;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_i a[i] * b[i] * w[i]
  double (*weighted_dot)(const double* a, const double* b, const double* w, std::size_t n);
  /// y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// (x, y) <- (c*x - s*y, s*x + c*y), the Givens/Jacobi plane rotation
  void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
  /// x[i] *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;
/// Null when the build target cannot produce that variant.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

bool cpu_supports(Backend b) noexcept;

/// Variants that are compiled in and runnable on this CPU, scalar first.
std::vector<const KernelTable*> available_kernels();

/// The process-wide selection. Fixed after the first call so repeated
/// computations are bit-identical.
const KernelTable& active() noexcept;

// Convenience wrappers over the active table.

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size());
}
inline double weighted_dot(std::span<const double> a, std::span<const double> b,
                           std::span<const double> w) noexcept {
  return active().weighted_dot(a.data(), b.data(), w.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline void rotate(std::span<double> x, std::span<double> y, double c, double s) noexcept {
  active().rotate(x.data(), y.data(), c, s, x.size());
}
inline void scale(double alpha, std::span<double> x) noexcept {
  active().scale(alpha, x.data(), x.size());
}

}  // namespace revmc::simd
