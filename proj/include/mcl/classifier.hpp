#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "mcl/affinity.hpp"
#include "mcl/centrality.hpp"
#include "mcl/feature_space.hpp"

namespace mcl {

/// Probabilities over the N support classes, in episode class order.
struct ClassDistribution {
  Vector probs;

  std::size_t size() const noexcept { return probs.size(); }
  double operator[](std::size_t c) const { return probs.at(c); }
};

/// Sums a support-side score vector over the class-major blocks of r entries
/// and normalises the block sums. Throws DegenerateError for a zero total.
ClassDistribution class_mass(std::span<const double> support_scores, std::size_t n_classes);

/// Accessibility head: per-class mass of the support stationary distribution.
ClassDistribution classify_mcl(const TransitionPair& pair, std::size_t n_classes,
                               const SolverConfig& solver = {});
ClassDistribution classify_mcl(const Episode& episode, Scales scales = kOneShotScales,
                               const SolverConfig& solver = {});

/// Katz head: per-class share of the support Katz scores at attenuation alpha.
/// `method` selects the dense or block-inverse closed form.
ClassDistribution classify_katz(const TransitionPair& pair, std::size_t n_classes,
                                double alpha = kKatzAlpha,
                                SolverMethod method = SolverMethod::KatzBlockInverse);
ClassDistribution classify_katz(const Episode& episode, Scales scales = kOneShotScales,
                                double alpha = kKatzAlpha,
                                SolverMethod method = SolverMethod::KatzBlockInverse);

/// Class shares of sum_{k=1}^{horizon} P^k e over the support states: the
/// expected visits of walks of length `horizon` from every start state,
/// without attenuation. As the horizon grows, even and odd horizons converge
/// to the same distribution as classify_mcl.
ClassDistribution truncated_accessibility(const TransitionPair& pair, std::size_t n_classes,
                                          std::uint64_t horizon);

/// Arg-max; exact ties go to the lowest class index.
std::size_t predict(const ClassDistribution& dist);

}  // namespace mcl
