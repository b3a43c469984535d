#pragma once

#include <cstddef>

#include "mcl/feature_space.hpp"
#include "mcl/matrix.hpp"

namespace mcl {

/// Similarity scales for the two transition directions.
struct Scales {
  double gamma;  // query -> support
  double beta;   // support -> query
};

inline constexpr Scales kOneShotScales{20.0, 10.0};
inline constexpr Scales kFiveShotScales{40.0, 20.0};

/// Norm below which a feature is treated as the zero vector; its cosine
/// against every partner is defined as 0.
inline constexpr double kZeroNormThreshold = 1e-12;

/// r x (N r) cosine similarities between query features (rows) and support
/// features (columns).
class AffinityMatrix {
 public:
  explicit AffinityMatrix(Matrix values) : values_(std::move(values)) {}

  std::size_t query_size() const noexcept { return values_.rows(); }
  std::size_t support_size() const noexcept { return values_.cols(); }
  double operator()(std::size_t q, std::size_t s) const noexcept { return values_(q, s); }
  const Matrix& matrix() const noexcept { return values_; }

 private:
  Matrix values_;
};

/// Column-stochastic blocks of the bipartite chain
///
///       | 0     P_sq |
///   P = |            |      states ordered support (N r) first, then query (r).
///       | P_qs  0    |
///
/// p_sq is (N r) x r: column j is the distribution over support features when
/// leaving query feature j. p_qs is r x (N r) and the reverse. The zero blocks
/// of P stay implicit.
class TransitionPair {
 public:
  /// Validates shapes, strict positivity and unit column sums (1e-9).
  TransitionPair(Matrix p_sq, Matrix p_qs, double gamma, double beta);

  const Matrix& p_sq() const noexcept { return p_sq_; }
  const Matrix& p_qs() const noexcept { return p_qs_; }
  double gamma() const noexcept { return gamma_; }
  double beta() const noexcept { return beta_; }

  std::size_t support_size() const noexcept { return p_sq_.rows(); }
  std::size_t query_size() const noexcept { return p_sq_.cols(); }
  std::size_t state_count() const noexcept { return support_size() + query_size(); }

 private:
  Matrix p_sq_;
  Matrix p_qs_;
  double gamma_;
  double beta_;
};

AffinityMatrix cosine_affinity(const FeatureMatrix& query, const FeatureMatrix& support_union);

/// out(i, j) = exp(scale m(i, j)) / sum_k exp(scale m(k, j)), evaluated with
/// the column maximum subtracted first.
Matrix column_softmax(const Matrix& m, double scale);

TransitionPair build_transitions(const AffinityMatrix& phi, double gamma, double beta);

inline TransitionPair build_transitions(const AffinityMatrix& phi, Scales scales) {
  return build_transitions(phi, scales.gamma, scales.beta);
}

/// Affinity plus transitions for one episode.
TransitionPair episode_transitions(const Episode& episode, Scales scales);

/// Explicit (N r + r) square matrix P. Reference and test path only.
Matrix assemble_dense(const TransitionPair& pair);

}  // namespace mcl
