#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mcl/matrix.hpp"

namespace mcl {

/// PA = LU with partial pivoting, blocked so the trailing update runs through
/// the gemm kernel. Throws NumericalError on an exactly singular pivot.
class LuFactorization {
 public:
  explicit LuFactorization(Matrix a);

  std::size_t order() const noexcept { return lu_.rows(); }
  Vector solve(std::span<const double> b) const;
  void solve_in_place(std::span<double> b) const;
  Matrix inverse() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> pivots_;
};

/// A = L L^T for symmetric positive definite A (lower triangle is read).
class CholeskyFactorization {
 public:
  explicit CholeskyFactorization(Matrix a);

  Vector solve(std::span<const double> b) const;

 private:
  Matrix l_;
};

/// Minimises ||A x - b||_2 for full-column-rank A (m >= n) through the normal
/// equations, followed by `refinement_steps` rounds of residual correction
/// against the original A. Throws NumericalError when A^T A is not
/// numerically positive definite.
Vector least_squares(const Matrix& a, std::span<const double> b, int refinement_steps = 2);

}  // namespace mcl
