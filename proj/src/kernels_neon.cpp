// AArch64 NEON kernels. Advanced SIMD is mandatory on AArch64, so this table
// is always usable when compiled in.

#include <arm_neon.h>

#include <algorithm>

#include "mcl/kernels.hpp"

namespace mcl::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_neon(double s, double* x, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vs, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= s;
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
    acc1 = vaddq_f64(acc1, vld1q_f64(x + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double max_neon(const double* x, std::size_t n) {
  if (n < 2) return x[0];
  float64x2_t m = vld1q_f64(x);
  std::size_t i = 2;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vld1q_f64(x + i));
  double out = vmaxvq_f64(m);
  for (; i < n; ++i) out = std::max(out, x[i]);
  return out;
}

void gemv_neon(std::size_t m, std::size_t n, const double* a, std::size_t lda, const double* x,
               double* y) {
  std::fill(y, y + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) axpy_neon(x[j], a + j * lda, y, m);
}

void gemv_t_neon(std::size_t m, std::size_t n, const double* a, std::size_t lda, const double* x,
                 double* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = dot_neon(a + j * lda, x, m);
}

void gemm_neon(std::size_t m, std::size_t n, std::size_t k, double alpha, const double* a,
               std::size_t lda, const double* b, std::size_t ldb, double beta, double* c,
               std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    if (beta == 0.0) {
      std::fill(cj, cj + m, 0.0);
    } else if (beta != 1.0) {
      scale_neon(beta, cj, m);
    }
    for (std::size_t p = 0; p < k; ++p) {
      const double bpj = alpha * b[j * ldb + p];
      if (bpj != 0.0) axpy_neon(bpj, a + p * lda, cj, m);
    }
  }
}

}  // namespace

const KernelTable kNeonKernels{
    SimdLevel::Neon, dot_neon,  axpy_neon,   scale_neon, sum_neon,
    max_neon,        gemv_neon, gemv_t_neon, gemm_neon,
};

}  // namespace mcl::detail
