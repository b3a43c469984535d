#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mcl/affinity.hpp"
#include "mcl/classifier.hpp"

namespace mcl {

/// Visit counts from simulate(). Counts exclude each trial's start state.
/// sum(visits_support) + sum(visits_query) == steps * trials.
struct WalkStats {
  std::vector<std::uint64_t> visits_support;
  std::vector<std::uint64_t> visits_query;
  std::uint64_t steps = 0;  // transitions per trial
  std::uint64_t trials = 0;
  std::uint64_t rng_seed = 0;
};

/// Monte Carlo simulation of the bipartite walk. Each trial starts from a
/// state drawn uniformly over all N r + r features, then alternates: a query
/// state jumps to a support state drawn from its p_sq column, a support state
/// to a query state drawn from its p_qs column.
///
/// Trial t draws from Stream(seed, t) (MT19937-64 seeded through SplitMix64),
/// so results are bit-identical for a given (pair, steps, trials, seed) no
/// matter how many worker threads run. `threads == 0` uses the hardware
/// concurrency.
WalkStats simulate(const TransitionPair& pair, std::uint64_t steps, std::uint64_t trials,
                   std::uint64_t seed, unsigned threads = 1);

/// States visited by trial `trial` of simulate(), start state first. States
/// are numbered support first (0 .. N r - 1) then query.
std::vector<std::size_t> walk_trace(const TransitionPair& pair, std::uint64_t steps,
                                    std::uint64_t seed, std::uint64_t trial = 0);

/// Class shares of the support visits (class-major layout).
ClassDistribution estimate_class_distribution(const WalkStats& stats, std::size_t n_classes);

/// Support visit counts normalised to frequencies.
Vector support_frequencies(const WalkStats& stats);

/// Monte Carlo estimate of the attenuated accessibility
///   sum_z E[ sum_{t=1}^{horizon} alpha^t 1[X_t in class c] | X_0 = z ],
/// normalised over classes. Requires alpha^horizon / (1 - alpha) < 1e-4 so the
/// truncated tail is negligible.
ClassDistribution estimate_katz_accessibility(const TransitionPair& pair, std::size_t n_classes,
                                              double alpha, std::uint64_t horizon,
                                              std::uint64_t trials, std::uint64_t seed,
                                              unsigned threads = 1);

}  // namespace mcl
