#include "mcl/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcl/error.hpp"
#include "mcl/kernels.hpp"

namespace mcl {
namespace {

constexpr double kColumnSumTolerance = 1e-9;

void check_stochastic(const Matrix& m, const char* name) {
  const KernelTable& k = active_kernels();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (double v : m.col(j))
      if (!(v > 0.0) || !std::isfinite(v))
        throw ValidationError(std::string(name) + ": entries must be finite and strictly positive");
    const double s = k.sum(m.col(j).data(), m.rows());
    if (std::abs(s - 1.0) > kColumnSumTolerance)
      throw ValidationError(std::string(name) + ": column " + std::to_string(j) + " sums to " +
                            std::to_string(s));
  }
}

// Columns scaled to unit length; zero (or sub-threshold) columns stay zero.
// The max-abs prescale keeps the norm finite for very large entries.
Matrix normalized_columns(const FeatureMatrix& f) {
  const KernelTable& k = active_kernels();
  Matrix out = f.matrix();
  for (std::size_t j = 0; j < out.cols(); ++j) {
    auto col = out.col(j);
    double peak = 0.0;
    for (double v : col) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) continue;
    k.scale(1.0 / peak, col.data(), col.size());
    const double norm = std::sqrt(k.dot(col.data(), col.data(), col.size())) * peak;
    if (!std::isfinite(norm)) throw ValidationError("cosine_affinity: feature norm is not finite");
    if (norm < kZeroNormThreshold) {
      std::fill(col.begin(), col.end(), 0.0);
      continue;
    }
    k.scale(peak / norm, col.data(), col.size());
  }
  return out;
}

}  // namespace

TransitionPair::TransitionPair(Matrix p_sq, Matrix p_qs, double gamma, double beta)
    : p_sq_(std::move(p_sq)), p_qs_(std::move(p_qs)), gamma_(gamma), beta_(beta) {
  if (p_sq_.empty() || p_qs_.empty()) throw DimensionError("transition blocks must be non-empty");
  if (p_sq_.rows() != p_qs_.cols() || p_sq_.cols() != p_qs_.rows())
    throw DimensionError("transition blocks are not transposed shapes of each other");
  check_stochastic(p_sq_, "p_sq");
  check_stochastic(p_qs_, "p_qs");
}

AffinityMatrix cosine_affinity(const FeatureMatrix& query, const FeatureMatrix& support_union) {
  if (query.dim() != support_union.dim())
    throw DimensionError("cosine_affinity: query has d=" + std::to_string(query.dim()) +
                         " but support has d=" + std::to_string(support_union.dim()));
  const Matrix qn_t = normalized_columns(query).transposed();
  const Matrix sn = normalized_columns(support_union);
  return AffinityMatrix(kernels::matmul(qn_t, sn));
}

Matrix column_softmax(const Matrix& m, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw ParameterError("column_softmax: scale must be positive and finite");
  const KernelTable& k = active_kernels();
  Matrix out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const auto src = m.col(j);
    auto dst = out.col(j);
    const double peak = k.max(src.data(), src.size());
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::exp(scale * (src[i] - peak));
    const double total = k.sum(dst.data(), dst.size());
    k.scale(1.0 / total, dst.data(), dst.size());
  }
  return out;
}

TransitionPair build_transitions(const AffinityMatrix& phi, double gamma, double beta) {
  if (!(gamma > 0.0) || !(beta > 0.0) || !std::isfinite(gamma) || !std::isfinite(beta))
    throw ParameterError("build_transitions: gamma and beta must be positive");
  Matrix p_sq = column_softmax(phi.matrix().transposed(), gamma);
  Matrix p_qs = column_softmax(phi.matrix(), beta);
  return TransitionPair(std::move(p_sq), std::move(p_qs), gamma, beta);
}

TransitionPair episode_transitions(const Episode& episode, Scales scales) {
  return build_transitions(cosine_affinity(episode.query(), episode.support_union()), scales);
}

Matrix assemble_dense(const TransitionPair& pair) {
  const std::size_t ns = pair.support_size();
  const std::size_t nq = pair.query_size();
  Matrix p(ns + nq, ns + nq);
  for (std::size_t j = 0; j < nq; ++j)
    for (std::size_t i = 0; i < ns; ++i) p(i, ns + j) = pair.p_sq()(i, j);
  for (std::size_t j = 0; j < ns; ++j)
    for (std::size_t i = 0; i < nq; ++i) p(ns + i, j) = pair.p_qs()(i, j);
  return p;
}

}  // namespace mcl
