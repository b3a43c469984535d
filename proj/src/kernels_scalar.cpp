// Reference kernels. Plain loops in a fixed summation order; the SIMD
// variants are tested against these.

#include <algorithm>

#include "mcl/kernels.hpp"

namespace mcl::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double s, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double max_scalar(const double* x, std::size_t n) {
  double m = x[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, x[i]);
  return m;
}

void gemv_scalar(std::size_t m, std::size_t n, const double* a, std::size_t lda, const double* x,
                 double* y) {
  std::fill(y, y + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) axpy_scalar(x[j], a + j * lda, y, m);
}

void gemv_t_scalar(std::size_t m, std::size_t n, const double* a, std::size_t lda, const double* x,
                   double* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = dot_scalar(a + j * lda, x, m);
}

void gemm_scalar(std::size_t m, std::size_t n, std::size_t k, double alpha, const double* a,
                 std::size_t lda, const double* b, std::size_t ldb, double beta, double* c,
                 std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    if (beta == 0.0) {
      std::fill(cj, cj + m, 0.0);
    } else if (beta != 1.0) {
      scale_scalar(beta, cj, m);
    }
    for (std::size_t p = 0; p < k; ++p) {
      const double bpj = alpha * b[j * ldb + p];
      if (bpj != 0.0) axpy_scalar(bpj, a + p * lda, cj, m);
    }
  }
}

}  // namespace

const KernelTable kScalarKernels{
    SimdLevel::Scalar, dot_scalar,  axpy_scalar,   scale_scalar, sum_scalar,
    max_scalar,        gemv_scalar, gemv_t_scalar, gemm_scalar,
};

}  // namespace mcl::detail
