#include "revmc/variance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "revmc/error.hpp"
#include "revmc/simd/kernels.hpp"

namespace revmc {

std::string_view to_string(VarianceRoute r) noexcept {
  switch (r) {
    case VarianceRoute::Spectral: return "spectral";
    case VarianceRoute::Resolvent: return "resolvent";
    case VarianceRoute::Autocov: return "autocov";
  }
  return "unknown";
}

namespace {

constexpr double kUnitGap = 1e-10;

void require_irreducible_spectrum(const SpectralDecomposition& spec) {
  if (spec.size() > 1 && spec.eigenvalues()[1] >= 1.0 - kUnitGap)
    throw Error(ErrorCode::NotIrreducible, "second eigenvalue is 1; the chain is reducible");
}

}  // namespace

VarianceResult asym_var_spectral(const SpectralDecomposition& spec, std::span<const double> f) {
  require_irreducible_spectrum(spec);
  const Vector f0 = centered(f, spec.pi());
  const Vector a = spec.coefficients(f0);
  VarianceResult r;
  r.route = VarianceRoute::Spectral;
  r.terms.reserve(spec.size() - 1);
  for (std::size_t i = 1; i < spec.size(); ++i) {
    const double l = spec.eigenvalues()[i];
    // An eigenvalue of exactly -1 contributes (1 + -1)/(1 - -1) = 0.
    const double ratio = l <= -1.0 ? 0.0 : (1.0 + l) / (1.0 - l);
    r.terms.push_back(a[i] * a[i] * ratio);
  }
  for (double t : r.terms) r.value += t;
  return r;
}

VarianceResult asym_var_resolvent(const TransitionMatrix& p, const TargetDistribution& pi,
                                  std::span<const double> f) {
  require_reversible(p, pi);
  if (!p.irreducible()) throw Error(ErrorCode::NotIrreducible, "resolvent route needs an irreducible chain");
  const std::size_t n = p.size();
  const Vector f0 = centered(f, pi);

  // I - P is singular on constants; adding Pi makes it invertible and leaves
  // its action on mean-zero functions unchanged.
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - p(i, j) + pi[j];
  const Vector x = solve(std::move(a), f0);

  VarianceResult r;
  r.route = VarianceRoute::Resolvent;
  r.value = std::max(0.0, 2.0 * weighted_inner(f0, x, pi) - weighted_inner(f0, f0, pi));
  return r;
}

AutocovSequence autocovariances(const SpectralDecomposition& spec, std::span<const double> f,
                                std::size_t max_lag) {
  const Vector f0 = centered(f, spec.pi());
  const Vector a = spec.coefficients(f0);
  const std::size_t n = spec.size();

  Vector weight(n > 0 ? n - 1 : 0);
  Vector power(weight.size());
  for (std::size_t i = 1; i < n; ++i) {
    weight[i - 1] = a[i] * a[i];
    power[i - 1] = 1.0;
  }
  AutocovSequence seq;
  seq.truncation_k = max_lag;
  seq.gammas.reserve(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    seq.gammas.push_back(simd::dot(weight, power));
    for (std::size_t i = 1; i < n; ++i) power[i - 1] *= spec.eigenvalues()[i];
  }
  const double lam = spec.second_largest_modulus();
  seq.tail_bound = lam < 1.0 - kUnitGap ? seq.gammas[0] * std::pow(lam, static_cast<double>(max_lag + 1)) / (1.0 - lam)
                             : std::numeric_limits<double>::infinity();
  return seq;
}

VarianceResult asym_var_autocov(const SpectralDecomposition& spec, std::span<const double> f,
                                double tail_tol) {
  require_irreducible_spectrum(spec);
  const double lam = spec.second_largest_modulus();
  if (lam >= 1.0 - kUnitGap)
    throw Error(ErrorCode::PeriodicChain,
                "an eigenvalue is -1; the autocovariance series does not converge");
  if (!(tail_tol > 0.0)) throw Error(ErrorCode::BadArgument, "tail tolerance must be positive");

  const Vector f0 = centered(f, spec.pi());
  const double gamma0 = weighted_inner(f0, f0, spec.pi());

  // 2 * gamma0 * lam^{K+1} / (1 - lam) <= tail_tol
  std::size_t k = 0;
  if (gamma0 > 0.0 && lam > 0.0) {
    const double target = tail_tol * (1.0 - lam) / (2.0 * gamma0);
    if (target < 1.0) k = static_cast<std::size_t>(std::ceil(std::log(target) / std::log(lam) - 1.0));
  }
  const AutocovSequence seq = autocovariances(spec, f0, k);

  VarianceResult r;
  r.route = VarianceRoute::Autocov;
  r.lags = k;
  r.value = seq.gammas[0];
  for (std::size_t i = 1; i < seq.gammas.size(); ++i) r.value += 2.0 * seq.gammas[i];
  r.value = std::max(0.0, r.value);
  return r;
}

// ---- Simulation ------------------------------------------------------------

namespace {

/// Deterministic across standard libraries, unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::size_t draw(std::span<const double> cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

Matrix cumulative_rows(const TransitionMatrix& p) {
  const std::size_t n = p.size();
  Matrix c(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) c(i, j) = (s += p(i, j));
  }
  return c;
}

std::vector<std::size_t> run_chain(const Matrix& cdf, std::size_t start, std::size_t steps,
                                   std::mt19937_64& rng) {
  std::vector<std::size_t> path;
  path.reserve(steps);
  std::size_t x = start;
  path.push_back(x);
  for (std::size_t t = 1; t < steps; ++t) {
    x = draw(cdf.row(x), unit_uniform(rng));
    path.push_back(x);
  }
  return path;
}

Vector cumulative(std::span<const double> p) {
  Vector c(p.size());
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) c[i] = (s += p[i]);
  return c;
}

}  // namespace

std::vector<std::size_t> simulate(const TransitionMatrix& p, std::size_t start, std::size_t steps,
                                  std::uint64_t seed) {
  if (start >= p.size())
    throw Error(ErrorCode::BadStartState, "start state " + std::to_string(start) + " outside 0.." +
                                              std::to_string(p.size() - 1));
  if (steps < 1) throw Error(ErrorCode::BadArgument, "steps must be at least 1");
  std::mt19937_64 rng(splitmix64(seed));
  return run_chain(cumulative_rows(p), start, steps, rng);
}

std::vector<std::size_t> simulate(const TransitionMatrix& p, const TargetDistribution& pi,
                                  std::size_t steps, std::uint64_t seed) {
  if (pi.size() != p.size()) throw Error(ErrorCode::DimensionMismatch, "chain vs distribution");
  if (steps < 1) throw Error(ErrorCode::BadArgument, "steps must be at least 1");
  std::mt19937_64 rng(splitmix64(seed));
  const std::size_t start = draw(cumulative(pi.probs()), unit_uniform(rng));
  return run_chain(cumulative_rows(p), start, steps, rng);
}

McEstimate mc_asym_var(const TransitionMatrix& p, const TargetDistribution& pi,
                       std::span<const double> f, std::size_t steps, std::size_t reps,
                       std::uint64_t seed) {
  if (!p.irreducible()) throw Error(ErrorCode::NotIrreducible, "Monte Carlo estimate needs an irreducible chain");
  if (f.size() != p.size()) throw Error(ErrorCode::DimensionMismatch, "functional vs chain");
  if (steps < 10000) throw Error(ErrorCode::BadArgument, "steps must be at least 10000");
  if (reps < 8) throw Error(ErrorCode::BadArgument, "reps must be at least 8");

  const std::size_t burn = steps / 10;
  const std::size_t kept = steps - burn;
  const Matrix cdf = cumulative_rows(p);
  const Vector start_cdf = cumulative(pi.probs());

  std::vector<double> path_means(reps);
  auto run_rep = [&](std::size_t r) {
    std::mt19937_64 rng(splitmix64(seed ^ static_cast<std::uint64_t>(r)));
    std::size_t x = draw(start_cdf, unit_uniform(rng));
    double sum = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
      if (t >= burn) sum += f[x];
      x = draw(cdf.row(x), unit_uniform(rng));
    }
    path_means[r] = sum / static_cast<double>(kept);
  };

  // Each replication owns its seed and output slot, so scheduling order
  // cannot change the result.
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, reps);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < reps; r += workers) run_rep(r);
      });
  }

  double grand = 0.0;
  for (double m : path_means) grand += m;
  grand /= static_cast<double>(reps);
  double ss = 0.0;
  for (double m : path_means) ss += (m - grand) * (m - grand);
  const double var_of_mean = ss / static_cast<double>(reps - 1);

  McEstimate e;
  e.mean_estimate = grand;
  e.asym_var_estimate = static_cast<double>(kept) * var_of_mean;
  // Normal-theory standard error of a sample variance with reps-1 dof.
  e.std_error = std::max(e.asym_var_estimate * std::sqrt(2.0 / static_cast<double>(reps - 1)),
                         std::numeric_limits<double>::min());
  e.steps = steps;
  e.replications = reps;
  e.seed = seed;
  return e;
}

}  // namespace revmc
