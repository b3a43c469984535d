#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "mcl/matrix.hpp"

namespace mcl {

enum class SimdLevel { Scalar, Avx2, Neon };

std::string_view to_string(SimdLevel level) noexcept;

/// Inner-loop primitives. All matrices are column-major with an explicit
/// leading dimension. Every ISA variant must agree with the scalar table to
/// rounding (FMA contraction and reassociated reductions are allowed).
struct KernelTable {
  SimdLevel level;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= s
  void (*scale)(double s, double* x, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  // n >= 1
  double (*max)(const double* x, std::size_t n);
  // y = A x for A (m x n)
  void (*gemv)(std::size_t m, std::size_t n, const double* a, std::size_t lda, const double* x,
               double* y);
  // y = A^T x for A (m x n); y has n entries
  void (*gemv_t)(std::size_t m, std::size_t n, const double* a, std::size_t lda, const double* x,
                 double* y);
  // C = alpha * A B + beta * C for A (m x k), B (k x n), C (m x n).
  // beta == 0 overwrites C without reading it.
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, double alpha, const double* a,
               std::size_t lda, const double* b, std::size_t ldb, double beta, double* c,
               std::size_t ldc);
};

/// Highest level the running CPU and this build both support.
SimdLevel detect_simd_level() noexcept;

/// Table for a specific level, or nullptr when that variant is not compiled
/// in or the CPU lacks the instructions.
const KernelTable* kernel_table(SimdLevel level) noexcept;

/// Table used by every numerical routine in the library. Defaults to
/// detect_simd_level() on first use.
const KernelTable& active_kernels() noexcept;

/// Pins the active table. Throws ParameterError if `level` is unavailable.
void set_simd_level(SimdLevel level);

namespace kernels {

double dot(std::span<const double> a, std::span<const double> b);
Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, std::span<const double> x);
Vector matvec_t(const Matrix& a, std::span<const double> x);

}  // namespace kernels

namespace detail {
extern const KernelTable kScalarKernels;
#if defined(MCL_HAVE_AVX2_TU)
extern const KernelTable kAvx2Kernels;
#endif
#if defined(MCL_HAVE_NEON_TU)
extern const KernelTable kNeonKernels;
#endif
}  // namespace detail

}  // namespace mcl
