#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>

#include "mcl/affinity.hpp"
#include "mcl/matrix.hpp"

namespace mcl {

/// Single-mode stationary distributions. pi_s has N r entries (support),
/// pi_q has r entries (query); each sums to 1.
struct CentralityPair {
  Vector pi_s;
  Vector pi_q;
};

/// Unnormalised Katz / eigenvector scores over all N r + r states, support
/// entries first.
struct RawCentrality {
  Vector x;
  std::size_t support_size = 0;
};

enum class SolverMethod { PowerIteration, LinearSystem, KatzClosedForm, KatzBlockInverse };

std::string_view to_string(SolverMethod method) noexcept;
/// Accepts the to_string() names plus "eigen", an alias for the block-inverse
/// Katz solver (the eigenvector approximation when alpha is near 1).
std::optional<SolverMethod> parse_solver_method(std::string_view name) noexcept;

inline constexpr double kEigenApproxAlpha = 0.999;
inline constexpr double kKatzAlpha = 0.5;

struct SolverConfig {
  SolverMethod method = SolverMethod::KatzBlockInverse;
  double alpha = kEigenApproxAlpha;  // Katz methods only
  double tol = 1e-10;                // power iteration only
  int max_iter = 10000;              // power iteration only

  /// Throws ParameterError unless 0 < alpha < 1, tol > 0, max_iter > 0.
  void validate() const;
};

/// Receives non-fatal numerical diagnostics (e.g. alpha very close to 1).
/// The default handler writes a single line to stderr.
using WarningHandler = std::function<void(std::string_view)>;
void set_warning_handler(WarningHandler handler);

/// Fixed point of v <- normalize(p_sq (p_qs v)) from the uniform vector.
/// The composed chain is strictly positive, hence aperiodic, so this converges
/// where iterating P itself would oscillate with period 2.
/// Throws ConvergenceError carrying the last step size after max_iter sweeps.
CentralityPair stationary_power(const TransitionPair& pair, double tol = 1e-10,
                                int max_iter = 10000);

/// Least-squares solution of the stacked system [P_sq P_qs - I; e^T] pi = [0; 1].
CentralityPair stationary_linear(const TransitionPair& pair);

/// x = ((I - alpha P)^{-1} - I) e on the explicit dense P.
RawCentrality katz_closed_form(const TransitionPair& pair, double alpha);

/// Same vector as katz_closed_form, from one r x r factorisation of
/// Delta = I - alpha^2 P_qs P_sq. Never forms the dense P.
RawCentrality katz_block_inverse(const TransitionPair& pair, double alpha);

/// Katz centrality at alpha close to 1, normalised per mode. alpha in (0.9, 1).
CentralityPair eigen_approx(const TransitionPair& pair, double alpha = kEigenApproxAlpha);

/// Splits raw scores at the support/query boundary and normalises each slice.
/// Throws DegenerateError when a slice sums to zero.
CentralityPair single_mode_normalize(const RawCentrality& raw);

/// Dispatches on config.method. Katz methods are normalised per mode.
CentralityPair solve_centrality(const TransitionPair& pair, const SolverConfig& config);

}  // namespace mcl
