#include "revmc/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "revmc/error.hpp"
#include "revmc/simd/kernels.hpp"
#include "revmc/variance.hpp"

namespace revmc {

std::string_view to_string(Relation r) noexcept {
  switch (r) {
    case Relation::FirstDominates: return "first_dominates";
    case Relation::SecondDominates: return "second_dominates";
    case Relation::Equal: return "equal";
    case Relation::Incomparable: return "incomparable";
    case Relation::Indeterminate: return "indeterminate";
  }
  return "unknown";
}

namespace {

void require_pair(const TransitionMatrix& p, const TransitionMatrix& q, const TargetDistribution& pi) {
  if (p.size() != q.size() || p.size() != pi.size())
    throw Error(ErrorCode::DimensionMismatch, "chains and distribution must share a state space");
  require_reversible(p, pi);
  require_reversible(q, pi);
}

void require_irreducible(const TransitionMatrix& p, const char* which) {
  if (!p.irreducible()) throw Error(ErrorCode::NotIrreducible, std::string(which) + " chain is reducible");
}

void require_irreducible(const SpectralDecomposition& s, const char* which) {
  if (s.size() > 1 && s.eigenvalues()[1] >= 1.0 - 1e-10)
    throw Error(ErrorCode::NotIrreducible, std::string(which) + " chain is reducible");
}

}  // namespace

SpectralDecomposition gap_decomposition(const TransitionMatrix& p, const TransitionMatrix& q,
                                        const TargetDistribution& pi) {
  require_pair(p, q, pi);
  return spectral_decompose_operator(q.entries() - p.entries(), pi);
}

Vector gap_spectrum(const TransitionMatrix& p, const TransitionMatrix& q, const TargetDistribution& pi) {
  return gap_decomposition(p, q, pi).eigenvalues();
}

double default_dominance_tolerance(std::span<const double> gap) noexcept {
  double m = 0.0;
  for (double g : gap) m = std::max(m, std::abs(g));
  return 1e-9 * (1.0 + m);
}

Relation classify_gap(std::span<const double> gap, double tol) noexcept {
  const double noise = 1e-3 * tol;
  bool pos = false, neg = false, pos_unclear = false, neg_unclear = false;
  for (double g : gap) {
    if (g > tol) pos = true;
    else if (g > noise) pos_unclear = true;
    else if (g < -tol) neg = true;
    else if (g < -noise) neg_unclear = true;
  }
  if (pos && neg) return Relation::Incomparable;
  if (!pos && !neg) return pos_unclear || neg_unclear ? Relation::Indeterminate : Relation::Equal;
  if (pos) return neg_unclear ? Relation::Indeterminate : Relation::FirstDominates;
  return pos_unclear ? Relation::Indeterminate : Relation::SecondDominates;
}

DominanceVerdict efficiency_dominates(const TransitionMatrix& p, const TransitionMatrix& q,
                                      const TargetDistribution& pi, double tol,
                                      std::uint64_t witness_seed) {
  require_pair(p, q, pi);
  require_irreducible(p, "first");
  require_irreducible(q, "second");

  DominanceVerdict v;
  v.gap_eigenvalues = gap_spectrum(p, q, pi);
  v.tolerance_used = tol > 0.0 ? tol : default_dominance_tolerance(v.gap_eigenvalues);
  v.relation = classify_gap(v.gap_eigenvalues, v.tolerance_used);
  if (v.relation == Relation::Equal && max_abs_diff(p.entries(), q.entries()) > v.tolerance_used)
    v.relation = Relation::Indeterminate;
  if (v.relation == Relation::SecondDominates || v.relation == Relation::Incomparable)
    v.witness = find_witness(p, q, pi, 1000, witness_seed, v.tolerance_used);
  return v;
}

bool peskun_dominates(const TransitionMatrix& p, const TransitionMatrix& q, double tol) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "Peskun comparison");
  for (std::size_t x = 0; x < p.size(); ++x)
    for (std::size_t y = 0; y < p.size(); ++y)
      if (x != y && p(x, y) < q(x, y) - tol) return false;
  return true;
}

bool eigen_dominates(const SpectralDecomposition& p, const SpectralDecomposition& q, double tol) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "eigen comparison");
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p.eigenvalues()[i] > q.eigenvalues()[i] + tol) return false;
  return true;
}

bool covariance_order_holds(const TransitionMatrix& p, const TransitionMatrix& q,
                            const TargetDistribution& pi, std::span<const double> f, double tol) {
  require_pair(p, q, pi);
  const Vector f0 = centered(f, pi);
  const Vector diff = (q.entries() - p.entries()) * f0;
  return weighted_inner(f0, diff, pi) >= -tol;
}

bool spectral_interval_dominates(const SpectralDecomposition& p, const SpectralDecomposition& q, double tol) {
  if (p.size() != q.size()) throw Error(ErrorCode::DimensionMismatch, "spectral interval comparison");
  require_irreducible(p, "first");
  require_irreducible(q, "second");
  return p.eigenvalues()[1] <= q.eigenvalues().back() + tol;
}

bool is_antithetic(const SpectralDecomposition& spec, double tol) {
  require_irreducible(spec, "the");
  return spec.eigenvalues()[1] <= tol && spec.eigenvalues().back() < -tol;
}

TraceCertificate trace_certificate(const TransitionMatrix& p, const TargetDistribution& pi, double tol) {
  const StructureReport s = validate_structure(p, pi);
  if (!s.stationary_ok)
    throw Error(ErrorCode::NotStationary, "pi is not stationary; largest flow imbalance " +
                                              std::to_string(s.max_stationarity_violation));
  TraceCertificate c;
  c.trace = p.trace();
  c.pi_max = pi.max();
  c.lower_bound = std::max(0.0, (2.0 * c.pi_max - 1.0) / c.pi_max);
  c.minimal = std::abs(c.trace - c.lower_bound) <= tol;
  c.certifies_non_dominated = c.minimal && s.reversible && s.irreducible;
  return c;
}

bool strict_trace_check(const TransitionMatrix& p, const TransitionMatrix& q, const TargetDistribution& pi) {
  require_pair(p, q, pi);
  return p.trace() < q.trace();
}

bool identical_spectrum_incomparable(const SpectralDecomposition& spec_p, const SpectralDecomposition& spec_q,
                                     const TransitionMatrix& p, const TransitionMatrix& q, double tol) {
  require_pair(p, q, spec_p.pi());
  if (spec_p.size() != spec_q.size()) throw Error(ErrorCode::DimensionMismatch, "spectra differ in size");
  for (std::size_t i = 0; i < spec_p.size(); ++i)
    if (std::abs(spec_p.eigenvalues()[i] - spec_q.eigenvalues()[i]) > tol) return false;
  return max_abs_diff(p.entries(), q.entries()) > tol;
}

std::optional<Witness> find_witness(const TransitionMatrix& p, const TransitionMatrix& q,
                                    const TargetDistribution& pi, std::size_t budget,
                                    std::uint64_t seed, double tol) {
  const SpectralDecomposition gap = gap_decomposition(p, q, pi);
  if (!(gap.eigenvalues().back() < -tol))
    throw Error(ErrorCode::NoNegativeEigenvalue, "Q - P has no eigenvalue below -tol");

  const SpectralDecomposition spec_p = spectral_decompose(p, pi);
  const SpectralDecomposition spec_q = spectral_decompose(q, pi);
  const std::size_t n = pi.size();

  auto check = [&](const Vector& f) -> std::optional<Witness> {
    const double vp = asym_var_spectral(spec_p, f).value;
    const double vq = asym_var_spectral(spec_q, f).value;
    if (vq < vp - 1e-12 * (1.0 + vp)) return Witness{Functional{f, false}, vp, vq};
    return std::nullopt;
  };

  const auto z_span = gap.eigenvector(n - 1);
  const Vector z(z_span.begin(), z_span.end());
  if (auto w = check(z)) return w;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double scale = 1.0;
  for (std::size_t trial = 0; trial < budget; ++trial) {
    Vector r(n);
    for (double& x : r) x = normal(rng);
    r = centered(r, pi);
    const double nr = std::sqrt(weighted_inner(r, r, pi));
    if (nr == 0.0) continue;
    Vector f = z;
    simd::axpy(scale / nr, r, f);
    if (auto w = check(f)) return w;
    scale *= 0.5;
    if (scale < 1e-6) scale = 1.0;
  }

  // The variance is <f,f> + 2<f, P(I-P)^{-1} f>, so a negative direction of
  // the resolvent difference is a witness whenever one exists.
  const Matrix diff = resolvent_operator(q, pi) - resolvent_operator(p, pi);
  const SpectralDecomposition rd = spectral_decompose_operator(diff, pi);
  if (rd.eigenvalues().back() < 0.0) {
    const auto v = rd.eigenvector(n - 1);
    if (auto w = check(Vector(v.begin(), v.end()))) return w;
  }
  return std::nullopt;
}

// ---- Loewner order ---------------------------------------------------------

double min_eigenvalue(const Matrix& a, std::span<const double> w) {
  return self_adjoint_eigen(a, w).values.back();
}

std::pair<bool, bool> psd_order_inverse_flip(const Matrix& j, const Matrix& k, std::span<const double> w,
                                             double tol) {
  if (j.rows() != w.size() || k.rows() != w.size())
    throw Error(ErrorCode::DimensionMismatch, "operators and weights differ in size");
  for (const Matrix* m : {&j, &k})
    if (self_adjoint_violation(*m, w) > 1e-10 * (1.0 + max_abs(*m)))
      throw Error(ErrorCode::NotSelfAdjoint, "operator is not self-adjoint in the weighted inner product");

  const SymmetricEigen ej = self_adjoint_eigen(j, w);
  const SymmetricEigen ek = self_adjoint_eigen(k, w);
  if (!(ej.values.back() > tol) || !(ek.values.back() > tol))
    throw Error(ErrorCode::NotStrictlyPositive, "operators must have all eigenvalues above tol");

  const auto reciprocal = [](double l) { return 1.0 / l; };
  const Matrix j_inv = spectral_function(ej, w, reciprocal);
  const Matrix k_inv = spectral_function(ek, w, reciprocal);
  const bool forward = min_eigenvalue(k - j, w) >= -tol;
  const bool inverse = min_eigenvalue(j_inv - k_inv, w) >= -tol;
  return {forward, inverse};
}

std::pair<bool, bool> psd_order_inverse_flip(const Matrix& j, const Matrix& k, const TargetDistribution& pi,
                                             double tol) {
  return psd_order_inverse_flip(j, k, pi.probs(), tol);
}

Matrix resolvent_operator(const TransitionMatrix& p, const TargetDistribution& pi) {
  if (p.size() != pi.size()) throw Error(ErrorCode::DimensionMismatch, "chain vs distribution");
  const std::size_t n = p.size();
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t jj = 0; jj < n; ++jj) a(i, jj) = (i == jj ? 1.0 : 0.0) - p(i, jj) + pi[jj];
  return inverse(std::move(a)) - Matrix::identity(n);
}

}  // namespace revmc
