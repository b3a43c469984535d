#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mcl/affinity.hpp"
#include "mcl/centrality.hpp"
#include "mcl/feature_space.hpp"

namespace mcl {

/// One pooled d-vector for the query image and one per support class.
struct PooledFeatures {
  Vector query_vec;
  std::vector<Vector> class_vecs;
};

/// Column mean of a feature block (global average pooling).
Vector global_average_pool(const FeatureMatrix& features);

/// sum_j pi_q[j] * q_j. pi_q must have r entries summing to 1.
Vector pool_query(const FeatureMatrix& query, std::span<const double> pi_q);

/// Per class c: renormalise pi_s over the class-c block, then take the convex
/// combination of that block's columns. Throws DegenerateError if a block
/// carries no mass.
std::vector<Vector> pool_support(const FeatureMatrix& support_union,
                                 std::span<const double> pi_s, std::size_t n_classes);

enum class PoolMode { Centrality, Average };

struct PoolingOptions {
  PoolMode query = PoolMode::Centrality;
  PoolMode support = PoolMode::Centrality;
};

/// Affinity, centrality (via `solver`), then pooling of both sides. Either
/// side can fall back to plain averaging through `options`.
PooledFeatures centrality_pool_episode(const Episode& episode, Scales scales = kOneShotScales,
                                       const SolverConfig& solver = {},
                                       const PoolingOptions& options = {});

}  // namespace mcl
