#pragma once

// Finite state spaces, target distributions, transition matrices and the
// pi-weighted geometry in which reversible chains are self-adjoint.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "revmc/linalg.hpp"
#include "revmc/matrix.hpp"

namespace revmc {

/// Default absolute tolerance for row sums, normalization and detailed
/// balance on an n-state space.
inline double structural_tolerance(std::size_t n) noexcept { return 1e-12 * static_cast<double>(n); }

/// Strictly positive probability vector over states 0..n-1.
class TargetDistribution {
 public:
  /// `weights` must be strictly positive with at least two entries. With
  /// `normalize` false the weights must already sum to one within 1e-12*n.
  explicit TargetDistribution(std::vector<double> weights, bool normalize = true,
                              std::vector<std::string> labels = {});

  static TargetDistribution uniform(std::size_t n);

  std::size_t size() const noexcept { return probs_.size(); }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  double max() const noexcept;
  double min() const noexcept;

 private:
  std::vector<double> probs_;
  std::vector<std::string> labels_;
};

inline TargetDistribution new_distribution(std::vector<double> weights, bool normalize = true) {
  return TargetDistribution(std::move(weights), normalize);
}

/// Row-stochastic matrix. Irreducibility and period are properties of the
/// positive-entry graph alone and are computed once at construction.
class TransitionMatrix {
 public:
  /// Throws NegativeEntry / NotRowStochastic naming the offending row.
  explicit TransitionMatrix(Matrix entries);

  std::size_t size() const noexcept { return entries_.rows(); }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_(i, j); }
  double trace() const noexcept { return entries_.trace(); }

  bool irreducible() const noexcept { return irreducible_; }
  /// gcd of cycle lengths through state 0 within its communicating class;
  /// 1 when that class has no cycle.
  unsigned period() const noexcept { return period_; }

  friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) {
    return a.entries_ == b.entries_;
  }

 private:
  Matrix entries_;
  bool irreducible_ = false;
  unsigned period_ = 1;
};

struct StructureReport {
  bool reversible = false;
  double max_detailed_balance_violation = 0.0;
  bool irreducible = false;
  unsigned period = 1;
  bool stationary_ok = false;
  double max_stationarity_violation = 0.0;
};

/// A function on the state space.
struct Functional {
  Vector values;
  bool mean_removed = false;

  std::size_t size() const noexcept { return values.size(); }
};

/// Eigenvalues (descending) and pi-orthonormal eigenvectors of an operator
/// that is self-adjoint in <f,g>_pi. For transition matrices the leading
/// eigenpair is pinned to (1, constant 1).
class SpectralDecomposition {
 public:
  SpectralDecomposition(Vector eigenvalues, Matrix eigenvectors, TargetDistribution pi);

  std::size_t size() const noexcept { return eigenvalues_.size(); }
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  /// Row i is v_i.
  const Matrix& eigenvectors() const noexcept { return eigenvectors_; }
  std::span<const double> eigenvector(std::size_t i) const noexcept { return eigenvectors_.row(i); }
  const TargetDistribution& pi() const noexcept { return pi_; }

  /// Coefficients a_i = <f, v_i>_pi.
  Vector coefficients(std::span<const double> f) const;
  /// sum_i lambda_i v_i v_i^T D.
  Matrix reconstruct() const;
  /// max_{i>=2} |lambda_i|.
  double second_largest_modulus() const noexcept;

 private:
  Vector eigenvalues_;
  Matrix eigenvectors_;
  TargetDistribution pi_;
};

StructureReport validate_structure(const TransitionMatrix& p, const TargetDistribution& pi,
                                   std::optional<double> tol = std::nullopt);

/// Throws NotReversible when detailed balance fails beyond `tol`.
void require_reversible(const TransitionMatrix& p, const TargetDistribution& pi,
                        std::optional<double> tol = std::nullopt);

double weighted_inner(const Functional& f, const Functional& g, const TargetDistribution& pi);
double weighted_inner(std::span<const double> f, std::span<const double> g,
                      const TargetDistribution& pi);

/// pi(f) = <f, 1>_pi
double mean(std::span<const double> f, const TargetDistribution& pi);

Functional project_zero_mean(const Functional& f, const TargetDistribution& pi);
Vector centered(std::span<const double> f, const TargetDistribution& pi);

SpectralDecomposition spectral_decompose(const TransitionMatrix& p, const TargetDistribution& pi);

/// Decomposition of an arbitrary pi-self-adjoint operator, no pinning.
SpectralDecomposition spectral_decompose_operator(const Matrix& a, const TargetDistribution& pi);

/// Pi(x, y) = pi(y): i.i.d. sampling from pi.
TransitionMatrix iid_operator(const TargetDistribution& pi);

/// Unique stationary distribution of an irreducible chain.
TargetDistribution stationary_distribution(const TransitionMatrix& p);

}  // namespace revmc
