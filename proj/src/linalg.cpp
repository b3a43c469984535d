#include "mcl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcl/error.hpp"
#include "mcl/kernels.hpp"

namespace mcl {
namespace {

constexpr std::size_t kPanelWidth = 48;

void swap_rows(Matrix& a, std::size_t r1, std::size_t r2, std::size_t col_begin,
               std::size_t col_end) {
  if (r1 == r2) return;
  for (std::size_t j = col_begin; j < col_end; ++j) std::swap(a(r1, j), a(r2, j));
}

}  // namespace

LuFactorization::LuFactorization(Matrix a) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) throw DimensionError("lu: matrix is not square");
  const std::size_t n = lu_.rows();
  const KernelTable& k = active_kernels();
  pivots_.resize(n);

  for (std::size_t k0 = 0; k0 < n; k0 += kPanelWidth) {
    const std::size_t kb = std::min(kPanelWidth, n - k0);
    const std::size_t k_end = k0 + kb;

    // Unblocked factorisation of the panel columns [k0, k_end).
    for (std::size_t j = k0; j < k_end; ++j) {
      std::size_t p = j;
      double best = std::abs(lu_(j, j));
      for (std::size_t i = j + 1; i < n; ++i) {
        const double v = std::abs(lu_(i, j));
        if (v > best) {
          best = v;
          p = i;
        }
      }
      if (best == 0.0)
        throw NumericalError("lu: matrix is singular at column " + std::to_string(j));
      pivots_[j] = p;
      swap_rows(lu_, j, p, k0, k_end);

      const double inv_pivot = 1.0 / lu_(j, j);
      double* below = lu_.ptr(j + 1, j);
      const std::size_t len = n - j - 1;
      k.scale(inv_pivot, below, len);
      for (std::size_t c = j + 1; c < k_end; ++c) k.axpy(-lu_(j, c), below, lu_.ptr(j + 1, c), len);
    }

    // Replay the panel's row swaps on the columns outside it.
    for (std::size_t j = k0; j < k_end; ++j) {
      swap_rows(lu_, j, pivots_[j], 0, k0);
      swap_rows(lu_, j, pivots_[j], k_end, n);
    }
    if (k_end == n) break;

    // U12 = L11^{-1} A12 (unit lower triangular solve).
    for (std::size_t c = k_end; c < n; ++c)
      for (std::size_t j = k0; j < k_end; ++j)
        k.axpy(-lu_(j, c), lu_.ptr(j + 1, j), lu_.ptr(j + 1, c), k_end - j - 1);

    // A22 -= L21 U12
    const std::size_t m2 = n - k_end;
    k.gemm(m2, m2, kb, -1.0, lu_.ptr(k_end, k0), n, lu_.ptr(k0, k_end), n, 1.0, lu_.ptr(k_end, k_end), n);
  }
}

void LuFactorization::solve_in_place(std::span<double> b) const {
  const std::size_t n = order();
  if (b.size() != n) throw DimensionError("lu solve: rhs length mismatch");
  const KernelTable& k = active_kernels();
  for (std::size_t j = 0; j < n; ++j) std::swap(b[j], b[pivots_[j]]);
  for (std::size_t j = 0; j < n; ++j)
    if (b[j] != 0.0) k.axpy(-b[j], lu_.ptr(j + 1, j), b.data() + j + 1, n - j - 1);
  for (std::size_t j = n; j-- > 0;) {
    b[j] /= lu_(j, j);
    if (b[j] != 0.0) k.axpy(-b[j], lu_.ptr(0, j), b.data(), j);
  }
}

Vector LuFactorization::solve(std::span<const double> b) const {
  Vector x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

Matrix LuFactorization::inverse() const {
  const std::size_t n = order();
  Matrix inv = Matrix::identity(n);
  for (std::size_t j = 0; j < n; ++j) solve_in_place(inv.col(j));
  return inv;
}

CholeskyFactorization::CholeskyFactorization(Matrix a) : l_(std::move(a)) {
  if (l_.rows() != l_.cols()) throw DimensionError("cholesky: matrix is not square");
  const std::size_t n = l_.rows();
  const KernelTable& k = active_kernels();
  Vector row(n);
  Vector update(n);
  // Left-looking: column j receives L[j:, :j] * L[j, :j]^T in one gemv.
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t len = n - j;
    if (j > 0) {
      for (std::size_t c = 0; c < j; ++c) row[c] = l_(j, c);
      k.gemv(len, j, l_.ptr(j, 0), n, row.data(), update.data());
      k.axpy(-1.0, update.data(), l_.ptr(j, j), len);
    }
    const double diag = l_(j, j);
    if (!(diag > 0.0))
      throw NumericalError("cholesky: matrix is not positive definite at column " +
                           std::to_string(j));
    const double root = std::sqrt(diag);
    k.scale(1.0 / root, l_.ptr(j, j), len);
    for (std::size_t i = 0; i < j; ++i) l_(i, j) = 0.0;
  }
}

Vector CholeskyFactorization::solve(std::span<const double> b) const {
  const std::size_t n = l_.rows();
  if (b.size() != n) throw DimensionError("cholesky solve: rhs length mismatch");
  const KernelTable& k = active_kernels();
  Vector x(b.begin(), b.end());
  for (std::size_t j = 0; j < n; ++j) {
    x[j] /= l_(j, j);
    if (x[j] != 0.0) k.axpy(-x[j], l_.ptr(j + 1, j), x.data() + j + 1, n - j - 1);
  }
  // L^T is upper triangular; row j of L^T is column j of L.
  for (std::size_t j = n; j-- > 0;) {
    x[j] = (x[j] - k.dot(l_.ptr(j + 1, j), x.data() + j + 1, n - j - 1)) / l_(j, j);
  }
  return x;
}

Vector least_squares(const Matrix& a, std::span<const double> b, int refinement_steps) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (b.size() != m) throw DimensionError("least squares: rhs length mismatch");
  if (m < n) throw DimensionError("least squares: system is underdetermined");

  const Matrix gram = kernels::matmul(a.transposed(), a);
  const CholeskyFactorization chol(gram);
  Vector x = chol.solve(kernels::matvec_t(a, b));

  for (int step = 0; step < refinement_steps; ++step) {
    Vector residual = kernels::matvec(a, x);
    for (std::size_t i = 0; i < m; ++i) residual[i] = b[i] - residual[i];
    const Vector dx = chol.solve(kernels::matvec_t(a, residual));
    for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
  }
  return x;
}

}  // namespace mcl
