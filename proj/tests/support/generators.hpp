#pragma once
// Random reversible chains for property tests. Everything here is built
// from explicit constructions (weighted graphs, Metropolis-Hastings, flow
// transfers) so the generated objects carry their properties by design.

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "revmc/chain.hpp"

namespace revmc::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Vector random_vector(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  Vector v(n);
  for (double& x : v) x = uniform(rng, lo, hi);
  return v;
}

inline TargetDistribution random_target(Rng& rng, std::size_t n) {
  Vector w(n);
  for (double& x : w) x = uniform(rng, 0.2, 1.0);
  return TargetDistribution(std::move(w));
}

struct Chain {
  TransitionMatrix p;
  TargetDistribution pi;
};

/// Random walk on a complete weighted graph with self-loops: reversible
/// with respect to the normalized vertex strengths, irreducible and
/// aperiodic.
inline Chain weighted_graph_walk(Rng& rng, std::size_t n, double loop_weight = 1.0) {
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double x = uniform(rng, 0.05, 1.0) * (i == j ? loop_weight : 1.0);
      w(i, j) = x;
      w(j, i) = x;
    }
  Vector strength(n, 0.0);
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) strength[i] += w(i, j);
    for (std::size_t j = 0; j < n; ++j) p(i, j) = w(i, j) / strength[i];
  }
  return {TransitionMatrix(std::move(p)), TargetDistribution(std::move(strength))};
}

/// Random walk on a complete bipartite weighted graph: period 2.
inline Chain bipartite_walk(Rng& rng, std::size_t n) {
  const std::size_t left = std::max<std::size_t>(1, n / 2);
  Matrix w(n, n);
  for (std::size_t i = 0; i < left; ++i)
    for (std::size_t j = left; j < n; ++j) {
      const double x = uniform(rng, 0.05, 1.0);
      w(i, j) = x;
      w(j, i) = x;
    }
  Vector strength(n, 0.0);
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) strength[i] += w(i, j);
    for (std::size_t j = 0; j < n; ++j) p(i, j) = w(i, j) / strength[i];
  }
  return {TransitionMatrix(std::move(p)), TargetDistribution(std::move(strength))};
}

/// Metropolis-Hastings on `pi` with a random symmetric proposal. With
/// density below one some proposal entries are zero; irreducibility is
/// kept by always proposing along the cycle 0-1-...-(n-1)-0.
inline TransitionMatrix metropolis(Rng& rng, const TargetDistribution& pi, double density = 1.0) {
  const std::size_t n = pi.size();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool ring = j == i + 1 || (i == 0 && j == n - 1);
      if (!ring && uniform(rng) > density) continue;
      const double x = uniform(rng, 0.05, 1.0);
      k(i, j) = x;
      k(j, i) = x;
    }
  double max_row = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += k(i, j);
    max_row = std::max(max_row, s);
  }
  const double scale = uniform(rng, 0.5, 1.0) / max_row;
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      p(i, j) = scale * k(i, j) * std::min(1.0, pi[j] / pi[i]);
      off += p(i, j);
    }
    p(i, i) = 1.0 - off;
  }
  return TransitionMatrix(std::move(p));
}

/// Random symmetric non-negative flow c (zero diagonal) turned into
/// z(x,y) = -c(x,y)/pi(x) off the diagonal and the row-balancing diagonal:
/// non-negative diagonal, non-positive off-diagonal, zero row sums, and
/// self-adjoint in the pi inner product.
inline Matrix row_sum_matrix(Rng& rng, const TargetDistribution& pi, double density = 0.7) {
  const std::size_t n = pi.size();
  Matrix z(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (uniform(rng) > density) continue;
      const double c = uniform(rng, 0.0, 1.0);
      z(i, j) = -c / pi[i];
      z(j, i) = -c / pi[j];
    }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s += z(i, j);
    z(i, i) = -s;
  }
  return z;
}

/// Moves diagonal mass of `q` off the diagonal along a random
/// pi-symmetric flow between states that hold diagonal mass. The result
/// stays reversible and strictly Peskun-dominates q whenever at least two
/// states have positive diagonal (otherwise q is returned unchanged).
inline TransitionMatrix peskun_improve(Rng& rng, const TransitionMatrix& q, const TargetDistribution& pi,
                                       double density = 0.7) {
  const std::size_t n = q.size();
  std::vector<std::size_t> donors;
  for (std::size_t i = 0; i < n; ++i)
    if (q(i, i) > 1e-9) donors.push_back(i);
  if (donors.size() < 2) return q;
  Matrix z(n, n);
  bool any = false;
  while (!any) {
    for (std::size_t a = 0; a < donors.size(); ++a)
      for (std::size_t b = a + 1; b < donors.size(); ++b) {
        if (uniform(rng) > density) continue;
        const std::size_t i = donors[a], j = donors[b];
        const double c = uniform(rng, 0.05, 1.0);
        z(i, j) = -c / pi[i];
        z(j, i) = -c / pi[j];
        any = true;
      }
  }
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s += z(i, j);
    z(i, i) = -s;
    if (z(i, i) > 0.0) scale = std::min(scale, q(i, i) / z(i, i));
  }
  scale *= uniform(rng, 0.2, 1.0);
  return TransitionMatrix(q.entries() - scale * z);
}

/// Rebuilds a reversible chain with the same pi and eigenvectors but its
/// non-trivial eigenvalues replaced by -c|lambda|, c shrunk until every
/// entry is non-negative. All non-trivial eigenvalues end up <= 0.
inline Chain antithetic_surgery(Rng& rng, std::size_t n) {
  for (;;) {
    Chain base = weighted_graph_walk(rng, n);
    const SpectralDecomposition spec = spectral_decompose(base.p, base.pi);
    Vector mu(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) mu[i] = -uniform(rng, 0.1, 1.0) * std::max(0.05, std::abs(spec.eigenvalues()[i]));
    auto build = [&](double c) {
      Matrix p(n, n);
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) p(x, y) = base.pi[y];
      for (std::size_t i = 1; i < n; ++i) {
        auto v = spec.eigenvector(i);
        for (std::size_t x = 0; x < n; ++x)
          for (std::size_t y = 0; y < n; ++y) p(x, y) += c * mu[i] * v[x] * v[y] * base.pi[y];
      }
      return p;
    };
    for (double c = 1.0; c > 1e-3; c *= 0.7) {
      Matrix p = build(c);
      bool ok = true;
      for (std::size_t x = 0; x < n && ok; ++x)
        for (std::size_t y = 0; y < n; ++y)
          if (p(x, y) < 0.0) {
            ok = false;
            break;
          }
      if (!ok) continue;
      // Re-balance rounding so rows sum to one exactly enough.
      for (std::size_t x = 0; x < n; ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < n; ++y) s += p(x, y);
        p(x, x) += 1.0 - s;
      }
      return {TransitionMatrix(std::move(p)), base.pi};
    }
  }
}

/// A pi-self-adjoint, strictly positive operator: W^{-1/2} (B B^T + eps I) W^{1/2}.
inline Matrix random_positive_operator(Rng& rng, std::span<const double> w, double eps = 0.1) {
  const std::size_t n = w.size();
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = uniform(rng, -1.0, 1.0);
  Matrix s = b * b.transposed() + eps * Matrix::identity(n);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = s(i, j) * std::sqrt(w[j] / w[i]);
  return a;
}

}  // namespace revmc::testing
