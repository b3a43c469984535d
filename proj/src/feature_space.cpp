#include "mcl/feature_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcl/error.hpp"

namespace mcl {
namespace {

std::string dims_of(const FeatureMatrix& m) {
  return std::to_string(m.dim()) + "x" + std::to_string(m.count());
}

FeatureMatrix concat_columns(const std::vector<FeatureMatrix>& blocks) {
  const std::size_t d = blocks.front().dim();
  const std::size_t r = blocks.front().count();
  Matrix out(d, r * blocks.size());
  double* dst = out.data();
  for (const FeatureMatrix& b : blocks) dst = std::copy_n(b.matrix().data(), d * r, dst);
  return FeatureMatrix(std::move(out));
}

}  // namespace

FeatureMatrix::FeatureMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0)
    throw DimensionError("feature matrix must have d >= 1 and r >= 1");
  for (double v : values_.values())
    if (!std::isfinite(v)) throw ValidationError("feature matrix contains a non-finite entry");
}

FeatureMatrix FeatureMatrix::from_columns(const std::vector<Vector>& columns) {
  if (columns.empty()) throw DimensionError("feature matrix needs at least one column");
  const std::size_t d = columns.front().size();
  Matrix m(d, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != d) throw DimensionError("feature columns differ in length");
    std::copy(columns[j].begin(), columns[j].end(), m.col(j).begin());
  }
  return FeatureMatrix(std::move(m));
}

Episode::Episode(std::vector<FeatureMatrix> supports, FeatureMatrix query)
    : supports_(std::move(supports)), query_(std::move(query)), union_(query_) {
  if (supports_.empty()) throw DimensionError("episode needs at least one support class");
  for (std::size_t c = 0; c < supports_.size(); ++c) {
    if (supports_[c].dim() != query_.dim() || supports_[c].count() != query_.count())
      throw DimensionError("support class " + std::to_string(c) + " is " + dims_of(supports_[c]) +
                           " but query is " + dims_of(query_));
  }
  union_ = concat_columns(supports_);
}

FeatureMatrix average_prototype(std::span<const FeatureMatrix> shots) {
  if (shots.empty()) throw ValidationError("average_prototype: no shots given");
  const std::size_t d = shots.front().dim();
  const std::size_t r = shots.front().count();
  Matrix sum(d, r);
  for (std::size_t k = 0; k < shots.size(); ++k) {
    if (shots[k].dim() != d || shots[k].count() != r)
      throw DimensionError("shot " + std::to_string(k) + " is " + dims_of(shots[k]) +
                           ", expected " + std::to_string(d) + "x" + std::to_string(r));
    const double* src = shots[k].matrix().data();
    double* dst = sum.data();
    for (std::size_t i = 0; i < d * r; ++i) dst[i] += src[i];
  }
  const double inv_k = 1.0 / static_cast<double>(shots.size());
  double* dst = sum.data();
  for (std::size_t i = 0; i < d * r; ++i) dst[i] *= inv_k;
  return FeatureMatrix(std::move(sum));
}

Episode build_episode(const std::vector<std::vector<FeatureMatrix>>& per_class_shots,
                      FeatureMatrix query) {
  if (per_class_shots.empty()) throw DimensionError("build_episode: no support classes");
  std::vector<FeatureMatrix> prototypes;
  prototypes.reserve(per_class_shots.size());
  for (std::size_t c = 0; c < per_class_shots.size(); ++c) {
    const auto& shots = per_class_shots[c];
    if (shots.empty())
      throw ValidationError("build_episode: class " + std::to_string(c) + " has no shots");
    try {
      prototypes.push_back(average_prototype(shots));
    } catch (const DimensionError& e) {
      throw DimensionError("class " + std::to_string(c) + ": " + e.what());
    }
  }
  return Episode(std::move(prototypes), std::move(query));
}

FeatureMatrix flatten_support(const Episode& episode) { return episode.support_union(); }

}  // namespace mcl
