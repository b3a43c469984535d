#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mcl/matrix.hpp"

namespace mcl {

/// d x r block of local features for one image or one class prototype.
/// Column j is local feature j. Entries are finite, d >= 1, r >= 1.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Matrix values);
  /// Builds from r column vectors of equal length d.
  static FeatureMatrix from_columns(const std::vector<Vector>& columns);

  std::size_t dim() const noexcept { return values_.rows(); }
  std::size_t count() const noexcept { return values_.cols(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_(i, j); }
  std::span<const double> column(std::size_t j) const noexcept { return values_.col(j); }
  const Matrix& matrix() const noexcept { return values_; }

  bool operator==(const FeatureMatrix&) const = default;

 private:
  Matrix values_;
};

/// One N-way task: a prototype per support class plus one query feature set.
/// All N + 1 matrices share (d, r). The class-major support union is built
/// once at construction.
class Episode {
 public:
  Episode(std::vector<FeatureMatrix> supports, FeatureMatrix query);

  std::size_t n_classes() const noexcept { return supports_.size(); }
  std::size_t dim() const noexcept { return query_.dim(); }
  /// Local features per image (r).
  std::size_t features_per_image() const noexcept { return query_.count(); }
  /// Nr
  std::size_t support_size() const noexcept { return n_classes() * features_per_image(); }

  const std::vector<FeatureMatrix>& supports() const noexcept { return supports_; }
  const FeatureMatrix& support(std::size_t c) const { return supports_.at(c); }
  const FeatureMatrix& query() const noexcept { return query_; }
  const FeatureMatrix& support_union() const noexcept { return union_; }

  bool operator==(const Episode& other) const {
    return supports_ == other.supports_ && query_ == other.query_;
  }

 private:
  std::vector<FeatureMatrix> supports_;
  FeatureMatrix query_;
  FeatureMatrix union_;
};

/// Position-wise mean of K aligned shots.
FeatureMatrix average_prototype(std::span<const FeatureMatrix> shots);

/// Averages each class's shots into a prototype and pairs them with the query.
Episode build_episode(const std::vector<std::vector<FeatureMatrix>>& per_class_shots,
                      FeatureMatrix query);

/// d x (N r) union S; columns [c r, (c + 1) r) are class c's features in order.
FeatureMatrix flatten_support(const Episode& episode);

/// Class owning column `column` of the support union.
inline std::size_t support_class_of(std::size_t column, std::size_t features_per_image) noexcept {
  return column / features_per_image;
}

}  // namespace mcl
