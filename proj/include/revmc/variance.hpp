#pragma once

// Asymptotic variance v(f,P) of the path average of f under a reversible
// chain, by three independent routes, plus a simulation oracle.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "revmc/chain.hpp"

namespace revmc {

enum class VarianceRoute { Spectral, Resolvent, Autocov };

std::string_view to_string(VarianceRoute r) noexcept;

struct VarianceResult {
  double value = 0.0;
  VarianceRoute route = VarianceRoute::Spectral;
  /// Spectral route only: (a_i)^2 (1+lambda_i)/(1-lambda_i) for i >= 2.
  std::vector<double> terms;
  /// Autocov route only: number of lags summed.
  std::size_t lags = 0;
};

struct AutocovSequence {
  std::vector<double> gammas;
  std::size_t truncation_k = 0;
  /// Bound on |sum_{k>K} gamma_k|; +inf when the chain is periodic or reducible.
  double tail_bound = 0.0;
};

struct McEstimate {
  double mean_estimate = 0.0;
  double asym_var_estimate = 0.0;
  double std_error = 0.0;
  std::size_t steps = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
};

/// sum_{i>=2} a_i^2 (1+lambda_i)/(1-lambda_i). Valid for periodic chains.
/// Throws NotIrreducible when lambda_2 is 1 within 1e-10.
VarianceResult asym_var_spectral(const SpectralDecomposition& spec, std::span<const double> f);

/// 2<f0,x> - <f0,f0> with (I - P + Pi) x = f0.
VarianceResult asym_var_resolvent(const TransitionMatrix& p, const TargetDistribution& pi,
                                  std::span<const double> f);

AutocovSequence autocovariances(const SpectralDecomposition& spec, std::span<const double> f,
                                std::size_t max_lag);

/// gamma_0 + 2 sum_{k=1}^K gamma_k, K chosen so the truncated tail
/// contributes at most `tail_tol`. Refuses periodic chains.
VarianceResult asym_var_autocov(const SpectralDecomposition& spec, std::span<const double> f,
                                double tail_tol = 1e-12);

std::vector<std::size_t> simulate(const TransitionMatrix& p, std::size_t start, std::size_t steps,
                                  std::uint64_t seed);
/// Same, with the initial state drawn from `pi`.
std::vector<std::size_t> simulate(const TransitionMatrix& p, const TargetDistribution& pi,
                                  std::size_t steps, std::uint64_t seed);

/// Replication estimator: `reps` independent chains of `steps` each, started
/// from pi, first 10% discarded. Replication r is seeded from seed ^ r.
McEstimate mc_asym_var(const TransitionMatrix& p, const TargetDistribution& pi,
                       std::span<const double> f, std::size_t steps, std::size_t reps,
                       std::uint64_t seed);

}  // namespace revmc
