#include "revmc/chain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "revmc/error.hpp"
#include "revmc/simd/kernels.hpp"

namespace revmc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::TooFewStates: return "TooFewStates";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NotRowStochastic: return "NotRowStochastic";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotReversible: return "NotReversible";
    case ErrorCode::NotIrreducible: return "NotIrreducible";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::PeriodicChain: return "PeriodicChain";
    case ErrorCode::BadStartState: return "BadStartState";
    case ErrorCode::BadArgument: return "BadArgument";
    case ErrorCode::NoNegativeEigenvalue: return "NoNegativeEigenvalue";
    case ErrorCode::NotStrictlyPositive: return "NotStrictlyPositive";
    case ErrorCode::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::BadMixingProbability: return "BadMixingProbability";
    case ErrorCode::BadComponentIndex: return "BadComponentIndex";
    case ErrorCode::BadBlockIndex: return "BadBlockIndex";
    case ErrorCode::NotReversibleForConditional: return "NotReversibleForConditional";
    case ErrorCode::StructureMismatch: return "StructureMismatch";
    case ErrorCode::NotIrreducibleMixture: return "NotIrreducibleMixture";
  }
  return "UnknownError";
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

// ---- TargetDistribution ----------------------------------------------------

TargetDistribution::TargetDistribution(std::vector<double> weights, bool normalize,
                                       std::vector<std::string> labels)
    : probs_(std::move(weights)), labels_(std::move(labels)) {
  const std::size_t n = probs_.size();
  if (n < 2) throw Error(ErrorCode::TooFewStates, "need at least 2 states, got " + std::to_string(n));
  if (!labels_.empty()) require_size(labels_.size(), n, "state labels");
  for (std::size_t i = 0; i < n; ++i)
    if (!(probs_[i] > 0.0) || !std::isfinite(probs_[i]))
      throw Error(ErrorCode::NonPositiveWeight,
                  "weight " + std::to_string(i) + " is " + fmt_double(probs_[i]));
  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (normalize) {
    for (double& p : probs_) p /= total;
  } else if (std::abs(total - 1.0) > structural_tolerance(n)) {
    throw Error(ErrorCode::NotNormalized, "probabilities sum to " + fmt_double(total));
  }
}

TargetDistribution TargetDistribution::uniform(std::size_t n) {
  return TargetDistribution(std::vector<double>(n, 1.0), true);
}

double TargetDistribution::max() const noexcept { return *std::max_element(probs_.begin(), probs_.end()); }
double TargetDistribution::min() const noexcept { return *std::min_element(probs_.begin(), probs_.end()); }

// ---- TransitionMatrix ------------------------------------------------------

namespace {

std::vector<bool> reachable(const Matrix& m, std::size_t from, bool reverse) {
  const std::size_t n = m.rows();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < n; ++v) {
      const double e = reverse ? m(v, u) : m(u, v);
      if (e > 0.0 && !seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

unsigned class_period(const Matrix& m, const std::vector<bool>& in_class) {
  const std::size_t n = m.rows();
  std::vector<long> level(n, -1);
  std::queue<std::size_t> q;
  level[0] = 0;
  q.push(0);
  while (!q.empty()) {
    const std::size_t u = q.front();
    q.pop();
    for (std::size_t v = 0; v < n; ++v)
      if (in_class[v] && m(u, v) > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      }
  }
  long g = 0;
  for (std::size_t u = 0; u < n; ++u) {
    if (!in_class[u]) continue;
    for (std::size_t v = 0; v < n; ++v)
      if (in_class[v] && m(u, v) > 0.0) g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
  }
  return g == 0 ? 1u : static_cast<unsigned>(g);
}

}  // namespace

TransitionMatrix::TransitionMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (!entries_.square()) require_size(entries_.rows(), entries_.cols(), "transition matrix shape");
  const std::size_t n = entries_.rows();
  if (n < 2) throw Error(ErrorCode::TooFewStates, "need at least 2 states, got " + std::to_string(n));
  const double tol = structural_tolerance(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = entries_(i, j);
      if (!std::isfinite(v) || v < 0.0)
        throw Error(ErrorCode::NegativeEntry, "entry (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ") is " + fmt_double(v));
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol)
      throw Error(ErrorCode::NotRowStochastic,
                  "row " + std::to_string(i) + " sums to " + fmt_double(sum));
  }

  const auto fwd = reachable(entries_, 0, false);
  const auto bwd = reachable(entries_, 0, true);
  std::vector<bool> in_class(n);
  irreducible_ = true;
  for (std::size_t i = 0; i < n; ++i) {
    in_class[i] = fwd[i] && bwd[i];
    irreducible_ = irreducible_ && in_class[i];
  }
  period_ = class_period(entries_, in_class);
}

// ---- Structure -------------------------------------------------------------

StructureReport validate_structure(const TransitionMatrix& p, const TargetDistribution& pi,
                                   std::optional<double> tol) {
  require_size(p.size(), pi.size(), "chain vs distribution");
  const std::size_t n = p.size();
  const double t = tol.value_or(structural_tolerance(n));
  StructureReport r;
  r.max_detailed_balance_violation = self_adjoint_violation(p.entries(), pi.probs());
  r.reversible = r.max_detailed_balance_violation <= t;
  for (std::size_t y = 0; y < n; ++y) {
    double flow = 0.0;
    for (std::size_t x = 0; x < n; ++x) flow += pi[x] * p(x, y);
    r.max_stationarity_violation = std::max(r.max_stationarity_violation, std::abs(flow - pi[y]));
  }
  r.stationary_ok = r.max_stationarity_violation <= t;
  r.irreducible = p.irreducible();
  r.period = p.period();
  return r;
}

void require_reversible(const TransitionMatrix& p, const TargetDistribution& pi,
                        std::optional<double> tol) {
  require_size(p.size(), pi.size(), "chain vs distribution");
  const std::size_t n = p.size();
  const double t = tol.value_or(structural_tolerance(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      const double gap = std::abs(pi[x] * p(x, y) - pi[y] * p(y, x));
      if (gap > t)
        throw Error(ErrorCode::NotReversible, "detailed balance fails at (" + std::to_string(x) +
                                                  "," + std::to_string(y) + ") by " +
                                                  fmt_double(gap));
    }
}

// ---- Inner-product geometry ------------------------------------------------

double weighted_inner(std::span<const double> f, std::span<const double> g,
                      const TargetDistribution& pi) {
  require_size(f.size(), pi.size(), "functional vs distribution");
  require_size(g.size(), pi.size(), "functional vs distribution");
  return simd::weighted_dot(f, g, pi.probs());
}

double weighted_inner(const Functional& f, const Functional& g, const TargetDistribution& pi) {
  return weighted_inner(std::span<const double>(f.values), std::span<const double>(g.values), pi);
}

double mean(std::span<const double> f, const TargetDistribution& pi) {
  require_size(f.size(), pi.size(), "functional vs distribution");
  return simd::dot(f, pi.probs());
}

Vector centered(std::span<const double> f, const TargetDistribution& pi) {
  const double m = mean(f, pi);
  Vector out(f.begin(), f.end());
  for (double& v : out) v -= m;
  return out;
}

Functional project_zero_mean(const Functional& f, const TargetDistribution& pi) {
  return Functional{centered(f.values, pi), true};
}

// ---- Spectral decomposition ------------------------------------------------

SpectralDecomposition::SpectralDecomposition(Vector eigenvalues, Matrix eigenvectors,
                                             TargetDistribution pi)
    : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)), pi_(std::move(pi)) {
  require_size(eigenvalues_.size(), pi_.size(), "spectrum vs distribution");
  require_size(eigenvectors_.rows(), pi_.size(), "eigenvectors vs distribution");
}

Vector SpectralDecomposition::coefficients(std::span<const double> f) const {
  require_size(f.size(), size(), "functional vs spectrum");
  Vector a(size());
  for (std::size_t i = 0; i < size(); ++i) a[i] = simd::weighted_dot(f, eigenvector(i), pi_.probs());
  return a;
}

Matrix SpectralDecomposition::reconstruct() const {
  return spectral_function(SymmetricEigen{eigenvalues_, eigenvectors_}, pi_.probs(),
                           [](double l) { return l; });
}

double SpectralDecomposition::second_largest_modulus() const noexcept {
  double m = 0.0;
  for (std::size_t i = 1; i < eigenvalues_.size(); ++i) m = std::max(m, std::abs(eigenvalues_[i]));
  return m;
}

SpectralDecomposition spectral_decompose_operator(const Matrix& a, const TargetDistribution& pi) {
  SymmetricEigen eig = self_adjoint_eigen(a, pi.probs());
  return SpectralDecomposition(std::move(eig.values), std::move(eig.vectors), pi);
}

namespace {

// Replace the basis of the eigenvalue-1 eigenspace so that its first vector
// is the constant function. The constant function always lies in that space.
void pin_constant_eigenvector(Vector& values, Matrix& vectors, std::span<const double> w) {
  const std::size_t n = values.size();
  std::size_t m = 0;
  while (m < n && values[m] >= 1.0 - 1e-10) ++m;
  m = std::max<std::size_t>(m, 1);

  const Vector ones(n, 1.0);
  std::vector<Vector> residual;
  for (std::size_t j = 0; j < m; ++j) {
    Vector r(vectors.row(j).begin(), vectors.row(j).end());
    simd::axpy(-simd::weighted_dot(r, ones, w), ones, r);
    residual.push_back(std::move(r));
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto norm = [&](const Vector& v) { return std::sqrt(simd::weighted_dot(v, v, w)); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return norm(residual[x]) > norm(residual[y]);
  });

  std::vector<Vector> basis{ones};
  for (std::size_t j : order) {
    if (basis.size() == m) break;
    Vector r = residual[j];
    for (std::size_t b = 1; b < basis.size(); ++b) simd::axpy(-simd::weighted_dot(r, basis[b], w), basis[b], r);
    const double nr = norm(r);
    if (nr < 1e-8) continue;
    simd::scale(1.0 / nr, r);
    basis.push_back(std::move(r));
  }
  for (std::size_t j = 0; j < basis.size(); ++j)
    std::copy(basis[j].begin(), basis[j].end(), vectors.row(j).begin());
  values[0] = 1.0;
}

}  // namespace

SpectralDecomposition spectral_decompose(const TransitionMatrix& p, const TargetDistribution& pi) {
  require_reversible(p, pi);
  SymmetricEigen eig = self_adjoint_eigen(p.entries(), pi.probs());
  for (double& l : eig.values) l = std::clamp(l, -1.0, 1.0);
  pin_constant_eigenvector(eig.values, eig.vectors, pi.probs());
  return SpectralDecomposition(std::move(eig.values), std::move(eig.vectors), pi);
}

// ---- Special chains --------------------------------------------------------

TransitionMatrix iid_operator(const TargetDistribution& pi) {
  const std::size_t n = pi.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) std::copy(pi.probs().begin(), pi.probs().end(), m.row(i).begin());
  return TransitionMatrix(std::move(m));
}

TargetDistribution stationary_distribution(const TransitionMatrix& p) {
  if (!p.irreducible())
    throw Error(ErrorCode::NotIrreducible, "stationary distribution is not unique");
  const std::size_t n = p.size();
  Matrix a = p.entries().transposed();
  for (std::size_t i = 0; i < n; ++i) a(i, i) -= 1.0;
  for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  Vector b(n, 0.0);
  b[n - 1] = 1.0;
  Vector x = solve(std::move(a), std::move(b));
  for (std::size_t i = 0; i < n; ++i)
    if (!(x[i] > 0.0))
      throw Error(ErrorCode::SingularSystem,
                  "stationary solve produced non-positive mass at state " + std::to_string(i));
  return TargetDistribution(std::move(x), true);
}

}  // namespace revmc
