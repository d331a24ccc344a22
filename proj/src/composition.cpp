#include "revmc/composition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "revmc/error.hpp"
#include "revmc/simd/kernels.hpp"

namespace revmc {

// ---- ProductSpec -----------------------------------------------------------

ProductSpec::ProductSpec(std::vector<std::size_t> component_sizes) : sizes_(std::move(component_sizes)) {
  if (sizes_.empty()) throw Error(ErrorCode::BadArgument, "product needs at least one component");
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] == 0)
      throw Error(ErrorCode::BadArgument, "component " + std::to_string(i + 1) + " is empty");
    total_ *= sizes_[i];
  }
}

std::size_t ProductSpec::to_flat(std::span<const std::size_t> tuple) const {
  if (tuple.size() != sizes_.size()) throw Error(ErrorCode::DimensionMismatch, "tuple length");
  std::size_t flat = 0;
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (tuple[i] >= sizes_[i])
      throw Error(ErrorCode::BadArgument, "coordinate " + std::to_string(i + 1) + " out of range");
    flat = flat * sizes_[i] + tuple[i];
  }
  return flat;
}

std::vector<std::size_t> ProductSpec::to_tuple(std::size_t flat) const {
  if (flat >= total_) throw Error(ErrorCode::BadArgument, "flat index out of range");
  std::vector<std::size_t> t(sizes_.size());
  for (std::size_t i = sizes_.size(); i-- > 0;) {
    t[i] = flat % sizes_[i];
    flat /= sizes_[i];
  }
  return t;
}

// ---- Mixtures --------------------------------------------------------------

TransitionMatrix mix(const MixtureSpec& spec) {
  if (spec.kernels.empty() || spec.kernels.size() != spec.weights.size())
    throw Error(ErrorCode::BadWeights, "need one positive weight per kernel");
  double total = 0.0;
  for (double w : spec.weights) {
    if (!(w > 0.0)) throw Error(ErrorCode::BadWeights, "mixture weights must be strictly positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error(ErrorCode::BadWeights, "mixture weights must sum to 1");

  const std::size_t n = spec.kernels.front().size();
  Matrix out(n, n);
  for (std::size_t k = 0; k < spec.kernels.size(); ++k) {
    if (spec.kernels[k].size() != n) throw Error(ErrorCode::DimensionMismatch, "mixture kernels differ in size");
    simd::axpy(spec.weights[k], spec.kernels[k].entries().data(), out.data());
  }
  return TransitionMatrix(std::move(out));
}

// ---- Gibbs components ------------------------------------------------------

GibbsComponent gibbs_component(const TargetDistribution& pi, const ProductSpec& prod, std::size_t k) {
  if (k < 1 || k > prod.components())
    throw Error(ErrorCode::BadComponentIndex, "component " + std::to_string(k) + " not in 1.." +
                                                  std::to_string(prod.components()));
  if (pi.size() != prod.size())
    throw Error(ErrorCode::DimensionMismatch, "distribution has " + std::to_string(pi.size()) +
                                                  " states, product has " + std::to_string(prod.size()));
  const std::size_t axis = k - 1;
  const std::size_t width = prod.component_sizes()[axis];
  const std::size_t n = prod.size();

  // Flat indices whose k-th coordinate is 0, in increasing order, are
  // exactly the block representatives in lexicographic order of the others.
  std::vector<GibbsBlock> blocks;
  Matrix kernel(n, n);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::vector<std::size_t> tuple = prod.to_tuple(flat);
    if (tuple[axis] != 0) continue;
    GibbsBlock b;
    for (std::size_t v = 0; v < width; ++v) {
      tuple[axis] = v;
      b.states.push_back(prod.to_flat(tuple));
    }
    // pi(v) / sum_u pi(u) written as 1 / sum_u (pi(u)/pi(v)): the ratios are
    // exact when the masses are small-integer multiples of each other, which
    // keeps hand-written rational targets exact.
    b.conditional.resize(width);
    for (std::size_t v = 0; v < width; ++v) {
      double ratio_sum = 0.0;
      for (std::size_t u = 0; u < width; ++u) ratio_sum += pi[b.states[u]] / pi[b.states[v]];
      b.conditional[v] = 1.0 / ratio_sum;
    }
    b.kernel = Matrix(width, width);
    for (std::size_t r = 0; r < width; ++r)
      std::copy(b.conditional.begin(), b.conditional.end(), b.kernel.row(r).begin());
    for (std::size_t r = 0; r < width; ++r)
      for (std::size_t c = 0; c < width; ++c) kernel(b.states[r], b.states[c]) = b.kernel(r, c);
    blocks.push_back(std::move(b));
  }
  return GibbsComponent{k, TransitionMatrix(std::move(kernel)), std::move(blocks)};
}

TransitionMatrix random_scan_gibbs(const TargetDistribution& pi, const ProductSpec& prod) {
  MixtureSpec spec;
  const double w = 1.0 / static_cast<double>(prod.components());
  for (std::size_t k = 1; k <= prod.components(); ++k) {
    spec.kernels.push_back(gibbs_component(pi, prod, k).kernel);
    spec.weights.push_back(w);
  }
  return mix(spec);
}

GibbsComponent replace_block(const GibbsComponent& comp, std::size_t block_id, const Matrix& new_block,
                             double tol) {
  if (block_id >= comp.blocks.size())
    throw Error(ErrorCode::BadBlockIndex, "block " + std::to_string(block_id) + " not in 0.." +
                                              std::to_string(comp.blocks.size() - 1));
  const GibbsBlock& old = comp.blocks[block_id];
  const std::size_t width = old.states.size();
  if (new_block.rows() != width || new_block.cols() != width)
    throw Error(ErrorCode::DimensionMismatch, "block must be " + std::to_string(width) + "x" +
                                                  std::to_string(width));
  for (std::size_t r = 0; r < width; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < width; ++c) {
      if (!(new_block(r, c) >= 0.0))
        throw Error(ErrorCode::NotRowStochastic, "block " + std::to_string(block_id) + " entry (" +
                                                     std::to_string(r) + "," + std::to_string(c) +
                                                     ") is negative");
      sum += new_block(r, c);
    }
    if (std::abs(sum - 1.0) > tol * static_cast<double>(width))
      throw Error(ErrorCode::NotRowStochastic,
                  "block " + std::to_string(block_id) + " row " + std::to_string(r) + " does not sum to 1");
  }
  for (std::size_t r = 0; r < width; ++r)
    for (std::size_t c = r + 1; c < width; ++c)
      if (std::abs(old.conditional[r] * new_block(r, c) - old.conditional[c] * new_block(c, r)) >
          tol * static_cast<double>(width))
        throw Error(ErrorCode::NotReversibleForConditional,
                    "block " + std::to_string(block_id) + " violates detailed balance at (" +
                        std::to_string(r) + "," + std::to_string(c) + ")");

  GibbsComponent out = comp;
  out.blocks[block_id].kernel = new_block;
  Matrix kernel = comp.kernel.entries();
  for (std::size_t r = 0; r < width; ++r)
    for (std::size_t c = 0; c < width; ++c) kernel(old.states[r], old.states[c]) = new_block(r, c);
  out.kernel = TransitionMatrix(std::move(kernel));
  return out;
}

std::vector<Vector> block_gap_eigs(const GibbsComponent& old_comp, const GibbsComponent& new_comp) {
  if (old_comp.k != new_comp.k || old_comp.blocks.size() != new_comp.blocks.size())
    throw Error(ErrorCode::StructureMismatch, "components differ in index or block count");
  std::vector<Vector> out;
  for (std::size_t b = 0; b < old_comp.blocks.size(); ++b) {
    const GibbsBlock& o = old_comp.blocks[b];
    const GibbsBlock& n = new_comp.blocks[b];
    if (o.states != n.states) throw Error(ErrorCode::StructureMismatch, "block " + std::to_string(b) + " states differ");
    out.push_back(self_adjoint_eigen(o.kernel - n.kernel, o.conditional).values);
  }
  return out;
}

// ---- Improvement checks ----------------------------------------------------

namespace {

MixtureSpec make_mixture(std::span<const TransitionMatrix> comps, std::span<const double> weights) {
  MixtureSpec spec;
  spec.kernels.assign(comps.begin(), comps.end());
  spec.weights.assign(weights.begin(), weights.end());
  return spec;
}

}  // namespace

ImprovementVerdict component_improvement_verdict(std::span<const TransitionMatrix> old_comps,
                                                 std::span<const TransitionMatrix> new_comps,
                                                 std::span<const double> weights,
                                                 const TargetDistribution& pi, double tol) {
  if (old_comps.size() != new_comps.size() || old_comps.size() != weights.size())
    throw Error(ErrorCode::StructureMismatch, "old, new and weight lists differ in length");

  const TransitionMatrix old_mix = mix(make_mixture(old_comps, weights));
  const TransitionMatrix new_mix = mix(make_mixture(new_comps, weights));

  ImprovementVerdict out;
  double scale = 0.0;
  for (std::size_t k = 0; k < old_comps.size(); ++k) {
    // Spectrum of P_k - P'_k.
    out.component_gaps.push_back(gap_spectrum(new_comps[k], old_comps[k], pi));
    for (double g : out.component_gaps.back()) scale = std::max(scale, std::abs(g));
  }
  if (!old_mix.irreducible() || !new_mix.irreducible())
    throw Error(ErrorCode::NotIrreducibleMixture, std::string(old_mix.irreducible() ? "new" : "old") +
                                                      " mixture is reducible");

  const double t = tol > 0.0 ? tol : 1e-9 * (1.0 + scale);
  out.components_nonnegative = true;
  bool all_zero = true;
  for (const Vector& gaps : out.component_gaps)
    for (double g : gaps) {
      if (g < -1e-3 * t) out.components_nonnegative = false;
      if (std::abs(g) > t) all_zero = false;
    }

  DominanceVerdict direct = efficiency_dominates(new_mix, old_mix, pi, tol);
  out.direct_relation = direct.relation;
  out.verdict = direct;
  if (out.components_nonnegative) {
    out.verdict.relation = all_zero ? Relation::Equal : Relation::FirstDominates;
    out.verdict.tolerance_used = t;
    out.consistent = direct.relation == out.verdict.relation;
  } else {
    // No component-level claim to contradict; the direct check decides.
    out.consistent = true;
  }
  return out;
}

ImprovementVerdict component_improvement_verdict(std::span<const GibbsComponent> old_comps,
                                                 std::span<const GibbsComponent> new_comps,
                                                 std::span<const double> weights,
                                                 const TargetDistribution& pi, double tol) {
  if (old_comps.size() != new_comps.size())
    throw Error(ErrorCode::StructureMismatch, "old and new component lists differ in length");
  std::vector<TransitionMatrix> old_k, new_k;
  for (std::size_t i = 0; i < old_comps.size(); ++i) {
    if (old_comps[i].k != new_comps[i].k)
      throw Error(ErrorCode::StructureMismatch, "component indices differ at position " + std::to_string(i));
    old_k.push_back(old_comps[i].kernel);
    new_k.push_back(new_comps[i].kernel);
  }
  return component_improvement_verdict(std::span<const TransitionMatrix>(old_k),
                                       std::span<const TransitionMatrix>(new_k), weights, pi, tol);
}

std::pair<bool, bool> mixture_improvement_equivalence(const TransitionMatrix& p,
                                                      const TransitionMatrix& p_prime,
                                                      const TransitionMatrix& q, double a,
                                                      const TargetDistribution& pi, double tol) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::BadMixingProbability, "a must lie in (0, 1)");
  require_reversible(q, pi);
  if (!p.irreducible() || !p_prime.irreducible())
    throw Error(ErrorCode::NotIrreducible, "P and P' must be irreducible");

  auto dominates = [tol](const Vector& gap) {
    const Relation r = classify_gap(gap, tol);
    return r == Relation::FirstDominates || r == Relation::Equal;
  };
  const TransitionMatrix mix_p = mix({{p, q}, {a, 1.0 - a}});
  const TransitionMatrix mix_pp = mix({{p_prime, q}, {a, 1.0 - a}});
  return {dominates(gap_spectrum(p_prime, p, pi)), dominates(gap_spectrum(mix_pp, mix_p, pi))};
}

}  // namespace revmc
