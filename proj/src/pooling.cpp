#include "mcl/pooling.hpp"

#include <cmath>
#include <string>

#include "mcl/error.hpp"
#include "mcl/kernels.hpp"

namespace mcl {
namespace {

constexpr double kWeightSumTolerance = 1e-8;

void check_weights(std::span<const double> w, std::size_t expected, const char* who) {
  if (w.size() != expected)
    throw DimensionError(std::string(who) + ": expected " + std::to_string(expected) +
                         " weights, got " + std::to_string(w.size()));
  double total = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError(std::string(who) + ": weights must be finite and non-negative");
    total += v;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance)
    throw ValidationError(std::string(who) + ": weights sum to " + std::to_string(total));
}

Vector weighted_columns(const Matrix& m, std::size_t first_col, std::span<const double> weights) {
  Vector out(m.rows());
  active_kernels().gemv(m.rows(), weights.size(), m.ptr(0, first_col), m.rows(), weights.data(),
                        out.data());
  return out;
}

Vector block_average(const Matrix& m, std::size_t first_col, std::size_t count) {
  const KernelTable& k = active_kernels();
  Vector out(m.rows(), 0.0);
  for (std::size_t j = first_col; j < first_col + count; ++j) k.axpy(1.0, m.ptr(0, j), out.data(), m.rows());
  k.scale(1.0 / static_cast<double>(count), out.data(), out.size());
  return out;
}

}  // namespace

Vector global_average_pool(const FeatureMatrix& features) {
  return block_average(features.matrix(), 0, features.count());
}

Vector pool_query(const FeatureMatrix& query, std::span<const double> pi_q) {
  check_weights(pi_q, query.count(), "pool_query");
  return weighted_columns(query.matrix(), 0, pi_q);
}

std::vector<Vector> pool_support(const FeatureMatrix& support_union,
                                 std::span<const double> pi_s, std::size_t n_classes) {
  check_weights(pi_s, support_union.count(), "pool_support");
  if (n_classes == 0 || support_union.count() % n_classes != 0)
    throw DimensionError("pool_support: " + std::to_string(support_union.count()) +
                         " support columns do not split into " + std::to_string(n_classes) +
                         " classes");
  const std::size_t r = support_union.count() / n_classes;
  const KernelTable& k = active_kernels();
  std::vector<Vector> out;
  out.reserve(n_classes);
  Vector weights(r);
  for (std::size_t c = 0; c < n_classes; ++c) {
    const auto block = pi_s.subspan(c * r, r);
    const double mass = k.sum(block.data(), r);
    if (!(mass > 0.0))
      throw DegenerateError("pool_support: class " + std::to_string(c) + " has zero centrality mass");
    for (std::size_t j = 0; j < r; ++j) weights[j] = block[j] / mass;
    out.push_back(weighted_columns(support_union.matrix(), c * r, weights));
  }
  return out;
}

PooledFeatures centrality_pool_episode(const Episode& episode, Scales scales,
                                       const SolverConfig& solver, const PoolingOptions& options) {
  const CentralityPair pi = solve_centrality(episode_transitions(episode, scales), solver);
  PooledFeatures pooled;
  pooled.query_vec = options.query == PoolMode::Centrality ? pool_query(episode.query(), pi.pi_q)
                                                            : global_average_pool(episode.query());
  if (options.support == PoolMode::Centrality) {
    pooled.class_vecs = pool_support(episode.support_union(), pi.pi_s, episode.n_classes());
  } else {
    for (const FeatureMatrix& s : episode.supports()) pooled.class_vecs.push_back(global_average_pool(s));
  }
  return pooled;
}

}  // namespace mcl
