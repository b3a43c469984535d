// AVX2 + FMA kernels. Built with -mavx2 -mfma; only reachable through the
// dispatch table after a CPUID check.

#include <immintrin.h>

#include <algorithm>

#include "mcl/kernels.hpp"

namespace mcl::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
    acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i + 4,
                     _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
  }
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double s, double* x, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= s;
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double max_avx2(const double* x, std::size_t n) {
  if (n < 4) return *std::max_element(x, x + n);
  __m256d m = _mm256_loadu_pd(x);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(x + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double out = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) out = std::max(out, x[i]);
  return out;
}

void gemv_avx2(std::size_t m, std::size_t n, const double* a, std::size_t lda, const double* x,
               double* y) {
  std::fill(y, y + m, 0.0);
  std::size_t j = 0;
  // Four columns per sweep so each y load/store is amortised over 4 FMAs.
  for (; j + 4 <= n; j += 4) {
    const double* a0 = a + j * lda;
    const double* a1 = a0 + lda;
    const double* a2 = a1 + lda;
    const double* a3 = a2 + lda;
    const __m256d x0 = _mm256_set1_pd(x[j]);
    const __m256d x1 = _mm256_set1_pd(x[j + 1]);
    const __m256d x2 = _mm256_set1_pd(x[j + 2]);
    const __m256d x3 = _mm256_set1_pd(x[j + 3]);
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
      __m256d acc = _mm256_loadu_pd(y + i);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + i), x0, acc);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + i), x1, acc);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + i), x2, acc);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + i), x3, acc);
      _mm256_storeu_pd(y + i, acc);
    }
    for (; i < m; ++i) y[i] += a0[i] * x[j] + a1[i] * x[j + 1] + a2[i] * x[j + 2] + a3[i] * x[j + 3];
  }
  for (; j < n; ++j) axpy_avx2(x[j], a + j * lda, y, m);
}

void gemv_t_avx2(std::size_t m, std::size_t n, const double* a, std::size_t lda, const double* x,
                 double* y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = dot_avx2(a + j * lda, x, m);
}

// 8x4 register block: two ymm rows-halves times four broadcast B entries.
template <int NC>
inline void micro_8xNC(std::size_t k, const double* a, std::size_t lda, const double* b,
                       std::size_t ldb, double alpha, double* c, std::size_t ldc) {
  __m256d lo[NC];
  __m256d hi[NC];
  for (int q = 0; q < NC; ++q) {
    lo[q] = _mm256_setzero_pd();
    hi[q] = _mm256_setzero_pd();
  }
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d a_lo = _mm256_loadu_pd(a + p * lda);
    const __m256d a_hi = _mm256_loadu_pd(a + p * lda + 4);
    for (int q = 0; q < NC; ++q) {
      const __m256d bv = _mm256_broadcast_sd(b + q * ldb + p);
      lo[q] = _mm256_fmadd_pd(a_lo, bv, lo[q]);
      hi[q] = _mm256_fmadd_pd(a_hi, bv, hi[q]);
    }
  }
  const __m256d va = _mm256_set1_pd(alpha);
  for (int q = 0; q < NC; ++q) {
    double* cq = c + q * ldc;
    _mm256_storeu_pd(cq, _mm256_fmadd_pd(va, lo[q], _mm256_loadu_pd(cq)));
    _mm256_storeu_pd(cq + 4, _mm256_fmadd_pd(va, hi[q], _mm256_loadu_pd(cq + 4)));
  }
}

void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, double alpha, const double* a,
               std::size_t lda, const double* b, std::size_t ldb, double beta, double* c,
               std::size_t ldc) {
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = c + j * ldc;
    if (beta == 0.0) {
      std::fill(cj, cj + m, 0.0);
    } else if (beta != 1.0) {
      scale_avx2(beta, cj, m);
    }
  }
  if (k == 0 || alpha == 0.0) return;

  constexpr std::size_t kBlockK = 256;
  constexpr std::size_t kBlockM = 128;
  const std::size_t m8 = m - m % 8;
  for (std::size_t p0 = 0; p0 < k; p0 += kBlockK) {
    const std::size_t kc = std::min(kBlockK, k - p0);
    for (std::size_t i0 = 0; i0 < m8; i0 += kBlockM) {
      const std::size_t i_end = std::min(i0 + kBlockM, m8);
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4)
        for (std::size_t i = i0; i < i_end; i += 8)
          micro_8xNC<4>(kc, a + p0 * lda + i, lda, b + j * ldb + p0, ldb, alpha, c + j * ldc + i,
                        ldc);
      for (; j < n; ++j)
        for (std::size_t i = i0; i < i_end; i += 8)
          micro_8xNC<1>(kc, a + p0 * lda + i, lda, b + j * ldb + p0, ldb, alpha, c + j * ldc + i,
                        ldc);
    }
    // Leftover rows (m % 8) go through plain loops.
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = m8; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t p = p0; p < p0 + kc; ++p) acc += a[p * lda + i] * b[j * ldb + p];
        c[j * ldc + i] += alpha * acc;
      }
  }
}

}  // namespace

const KernelTable kAvx2Kernels{
    SimdLevel::Avx2, dot_avx2,  axpy_avx2,   scale_avx2, sum_avx2,
    max_avx2,        gemv_avx2, gemv_t_avx2, gemm_avx2,
};

}  // namespace mcl::detail
