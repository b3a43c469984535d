#include <atomic>
#include <string>

#include "mcl/error.hpp"
#include "mcl/kernels.hpp"

namespace mcl {

std::string_view to_string(SimdLevel level) noexcept {
  switch (level) {
    case SimdLevel::Scalar:
      return "scalar";
    case SimdLevel::Avx2:
      return "avx2";
    case SimdLevel::Neon:
      return "neon";
  }
  return "unknown";
}

namespace {

bool cpu_has_avx2_fma() noexcept {
#if defined(MCL_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

SimdLevel detect_simd_level() noexcept {
#if defined(MCL_HAVE_NEON_TU)
  return SimdLevel::Neon;
#else
  return cpu_has_avx2_fma() ? SimdLevel::Avx2 : SimdLevel::Scalar;
#endif
}

const KernelTable* kernel_table(SimdLevel level) noexcept {
  switch (level) {
    case SimdLevel::Scalar:
      return &detail::kScalarKernels;
    case SimdLevel::Avx2:
#if defined(MCL_HAVE_AVX2_TU)
      if (cpu_has_avx2_fma()) return &detail::kAvx2Kernels;
#endif
      return nullptr;
    case SimdLevel::Neon:
#if defined(MCL_HAVE_NEON_TU)
      return &detail::kNeonKernels;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active_kernels() noexcept {
  const KernelTable* table = g_active.load(std::memory_order_acquire);
  if (table == nullptr) {
    table = kernel_table(detect_simd_level());
    const KernelTable* expected = nullptr;
    if (!g_active.compare_exchange_strong(expected, table, std::memory_order_acq_rel))
      table = expected;
  }
  return *table;
}

void set_simd_level(SimdLevel level) {
  const KernelTable* table = kernel_table(level);
  if (table == nullptr)
    throw ParameterError("simd level '" + std::string(to_string(level)) +
                         "' is not available on this machine");
  g_active.store(table, std::memory_order_release);
}

namespace kernels {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  return active_kernels().dot(a.data(), b.data(), a.size());
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  if (c.empty()) return c;
  active_kernels().gemm(a.rows(), b.cols(), a.cols(), 1.0, a.data(), a.rows(), b.data(), b.rows(),
                        0.0, c.data(), c.rows());
  return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matvec: length mismatch");
  Vector y(a.rows());
  active_kernels().gemv(a.rows(), a.cols(), a.data(), a.rows(), x.data(), y.data());
  return y;
}

Vector matvec_t(const Matrix& a, std::span<const double> x) {
  if (a.rows() != x.size()) throw DimensionError("matvec_t: length mismatch");
  Vector y(a.cols());
  active_kernels().gemv_t(a.rows(), a.cols(), a.data(), a.rows(), x.data(), y.data());
  return y;
}

}  // namespace kernels
}  // namespace mcl
