#pragma once

// Composite samplers: convex mixtures of kernels and random-scan Gibbs
// samplers on product state spaces, and checks that improving components
// improves the whole sampler.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "revmc/chain.hpp"
#include "revmc/dominance.hpp"

namespace revmc {

/// S = S_1 x ... x S_l with lexicographic flat indexing (last coordinate
/// varies fastest). Coordinates are 0-based values.
class ProductSpec {
 public:
  explicit ProductSpec(std::vector<std::size_t> component_sizes);

  std::size_t size() const noexcept { return total_; }
  std::size_t components() const noexcept { return sizes_.size(); }
  const std::vector<std::size_t>& component_sizes() const noexcept { return sizes_; }

  std::size_t to_flat(std::span<const std::size_t> tuple) const;
  std::vector<std::size_t> to_tuple(std::size_t flat) const;

 private:
  std::vector<std::size_t> sizes_;
  std::size_t total_ = 1;
};

/// One block of a Gibbs component: the states sharing the values of every
/// coordinate except k, ordered by the value of coordinate k.
struct GibbsBlock {
  std::vector<std::size_t> states;
  Matrix kernel;
  Vector conditional;
};

struct GibbsComponent {
  /// 1-based component index.
  std::size_t k = 0;
  TransitionMatrix kernel;
  /// Ordered lexicographically by the other coordinates.
  std::vector<GibbsBlock> blocks;
};

struct MixtureSpec {
  std::vector<TransitionMatrix> kernels;
  std::vector<double> weights;
};

/// sum_k a_k P_k. Throws BadWeights unless weights are positive and sum to 1.
TransitionMatrix mix(const MixtureSpec& spec);

/// Kernel that resamples coordinate k (1-based) from its conditional
/// distribution given the others.
GibbsComponent gibbs_component(const TargetDistribution& pi, const ProductSpec& prod, std::size_t k);

/// Equal-weight mixture of every Gibbs component.
TransitionMatrix random_scan_gibbs(const TargetDistribution& pi, const ProductSpec& prod);

/// Substitutes one block. The new block must be row-stochastic and
/// reversible with respect to that block's conditional distribution.
GibbsComponent replace_block(const GibbsComponent& comp, std::size_t block_id, const Matrix& new_block,
                             double tol = 1e-12);

/// Per block, the spectrum of (old block - new block) as an operator
/// self-adjoint w.r.t. the block conditional.
std::vector<Vector> block_gap_eigs(const GibbsComponent& old_comp, const GibbsComponent& new_comp);

struct ImprovementVerdict {
  /// FirstDominates means the new composite dominates the old one.
  DominanceVerdict verdict;
  /// Spectrum of P_k - P'_k for every component pair.
  std::vector<Vector> component_gaps;
  bool components_nonnegative = false;
  /// Relation from the direct gap spectrum of the two mixtures.
  Relation direct_relation = Relation::Indeterminate;
  /// Component evidence and direct check agree.
  bool consistent = false;
};

/// Non-positive `tol` selects the default dominance tolerance.
ImprovementVerdict component_improvement_verdict(std::span<const TransitionMatrix> old_comps,
                                                 std::span<const TransitionMatrix> new_comps,
                                                 std::span<const double> weights,
                                                 const TargetDistribution& pi, double tol = 0.0);
ImprovementVerdict component_improvement_verdict(std::span<const GibbsComponent> old_comps,
                                                 std::span<const GibbsComponent> new_comps,
                                                 std::span<const double> weights,
                                                 const TargetDistribution& pi, double tol = 0.0);

/// (P' dominates P, aP' + (1-a)Q dominates aP + (1-a)Q). Always equal.
std::pair<bool, bool> mixture_improvement_equivalence(const TransitionMatrix& p,
                                                      const TransitionMatrix& p_prime,
                                                      const TransitionMatrix& q, double a,
                                                      const TargetDistribution& pi, double tol = 1e-9);

}  // namespace revmc
