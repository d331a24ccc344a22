#pragma once

// Orderings between reversible chains sharing a stationary distribution:
// efficiency dominance via the spectrum of Q - P, Peskun and eigen
// dominance, trace-minimality certificates, witness search, and the
// Loewner-order inverse equivalence.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "revmc/chain.hpp"

namespace revmc {

enum class Relation { FirstDominates, SecondDominates, Equal, Incomparable, Indeterminate };

std::string_view to_string(Relation r) noexcept;

/// A function on which the second chain has strictly smaller asymptotic
/// variance than the first, together with both variances.
struct Witness {
  Functional f;
  double var_first = 0.0;
  double var_second = 0.0;
};

struct DominanceVerdict {
  Relation relation = Relation::Indeterminate;
  /// Spectrum of Q - P (second minus first), descending.
  Vector gap_eigenvalues;
  std::optional<Witness> witness;
  double tolerance_used = 0.0;
};

struct TraceCertificate {
  double trace = 0.0;
  double lower_bound = 0.0;
  bool minimal = false;
  double pi_max = 0.0;
  /// minimal, reversible and irreducible: no reversible chain can
  /// efficiency-dominate this one.
  bool certifies_non_dominated = false;
};

/// Spectrum of Q - P as a pi-self-adjoint operator, descending.
Vector gap_spectrum(const TransitionMatrix& p, const TransitionMatrix& q, const TargetDistribution& pi);
SpectralDecomposition gap_decomposition(const TransitionMatrix& p, const TransitionMatrix& q,
                                        const TargetDistribution& pi);

/// 1e-9 * (1 + max |gap eigenvalue|).
double default_dominance_tolerance(std::span<const double> gap) noexcept;

/// Classifies the sign pattern of the gap spectrum. Eigenvalues with
/// magnitude at most tol/1000 are rounding noise and count as zero; anything
/// beyond tol counts as a definite sign. A relation that hinges on a value in
/// between is reported as Indeterminate rather than rounded either way.
Relation classify_gap(std::span<const double> gap, double tol) noexcept;

/// Does P efficiency-dominate Q? Non-positive `tol` selects the default.
/// When Q is better along some direction a witness search is attempted.
DominanceVerdict efficiency_dominates(const TransitionMatrix& p, const TransitionMatrix& q,
                                      const TargetDistribution& pi, double tol = 0.0,
                                      std::uint64_t witness_seed = 0x5eed);

/// P(x,y) >= Q(x,y) - tol for every x != y.
bool peskun_dominates(const TransitionMatrix& p, const TransitionMatrix& q, double tol = 0.0);

/// Sorted spectra compared positionally: lambda_i(P) <= lambda_i(Q) + tol.
bool eigen_dominates(const SpectralDecomposition& p, const SpectralDecomposition& q, double tol = 1e-12);

/// <f0, (Q - P) f0>_pi >= -tol for this one f.
bool covariance_order_holds(const TransitionMatrix& p, const TransitionMatrix& q,
                            const TargetDistribution& pi, std::span<const double> f, double tol = 1e-12);

/// lambda_2(P) <= lambda_n(Q) + tol: a sufficient condition for dominance.
bool spectral_interval_dominates(const SpectralDecomposition& p, const SpectralDecomposition& q,
                                 double tol = 1e-12);

/// lambda_2 <= tol and lambda_n < -tol.
bool is_antithetic(const SpectralDecomposition& spec, double tol = 1e-12);

/// trace(P) against max(0, (2 pi_max - 1)/pi_max). Throws NotStationary.
TraceCertificate trace_certificate(const TransitionMatrix& p, const TargetDistribution& pi,
                                   double tol = 1e-12);

bool strict_trace_check(const TransitionMatrix& p, const TransitionMatrix& q, const TargetDistribution& pi);

/// Same sorted spectrum within tol but different matrices: neither can
/// efficiency-dominate the other.
bool identical_spectrum_incomparable(const SpectralDecomposition& spec_p, const SpectralDecomposition& spec_q,
                                     const TransitionMatrix& p, const TransitionMatrix& q,
                                     double tol = 1e-10);

/// Search for f with v(f,Q) < v(f,P). Starts from the eigenvector of the
/// most negative eigenvalue of Q - P, then tries random perturbations of it
/// with the perturbation scale halving after each failure. Returns nullopt
/// when the budget runs out. Throws NoNegativeEigenvalue when Q - P has no
/// eigenvalue below -tol.
std::optional<Witness> find_witness(const TransitionMatrix& p, const TransitionMatrix& q,
                                    const TargetDistribution& pi, std::size_t budget = 1000,
                                    std::uint64_t seed = 0x5eed, double tol = 1e-9);

// ---- Loewner order ---------------------------------------------------------

/// Minimum eigenvalue of a w-self-adjoint operator.
double min_eigenvalue(const Matrix& a, std::span<const double> w);

/// For strictly positive w-self-adjoint J and K returns
/// (K - J is PSD, J^{-1} - K^{-1} is PSD). The two always agree.
/// `w` are inner-product weights; they need not sum to one.
std::pair<bool, bool> psd_order_inverse_flip(const Matrix& j, const Matrix& k,
                                             std::span<const double> w, double tol = 1e-10);
std::pair<bool, bool> psd_order_inverse_flip(const Matrix& j, const Matrix& k,
                                             const TargetDistribution& pi, double tol = 1e-10);

/// P(I-P)^{-1} on mean-zero functions (zero on constants), via the deflated
/// inverse (I - P + Pi)^{-1} - I.
Matrix resolvent_operator(const TransitionMatrix& p, const TargetDistribution& pi);

}  // namespace revmc
