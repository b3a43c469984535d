#pragma once

#include <cstddef>
#include <cstdint>

#include "mcl/episode_io.hpp"
#include "mcl/feature_space.hpp"
#include "mcl/rng.hpp"

namespace mcl {

/// d x r matrix of independent unit-norm Gaussian directions.
FeatureMatrix random_unit_features(std::size_t d, std::size_t r, Stream& rng);

struct SyntheticSpec {
  std::size_t n_classes = 5;
  std::size_t k_shots = 1;
  std::size_t d = 64;
  std::size_t r = 25;
  double noise = 0.5;  // expected norm of the per-column perturbation
  std::uint64_t seed = 0;
};

struct SyntheticEpisode {
  EpisodeFile file;
  std::size_t query_class = 0;
};

/// Every class gets r random unit "part" directions; each shot and the query
/// perturb those parts with Gaussian noise and renormalise. The query is drawn
/// from class `seed mod N`. Values are rounded to float so the binary format
/// stores them exactly.
SyntheticEpisode generate_episode(const SyntheticSpec& spec);

/// Adds N(0, noise^2 / d) to every entry and renormalises each column.
FeatureMatrix perturb_features(const FeatureMatrix& base, double noise, Stream& rng);

}  // namespace mcl
