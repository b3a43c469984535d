#include "mcl/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <string>

#include "mcl/error.hpp"
#include "mcl/kernels.hpp"
#include "mcl/linalg.hpp"

namespace mcl {
namespace {

// Above this alpha the Katz system is close enough to singular that results
// lose several digits.
constexpr double kIllConditionedGap = 1e-6;
constexpr double kStochasticConstraintTolerance = 1e-8;

std::mutex g_warning_mutex;
WarningHandler g_warning_handler;

void warn(std::string_view message) {
  std::lock_guard lock(g_warning_mutex);
  if (g_warning_handler) {
    g_warning_handler(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw ParameterError(std::string(who) + ": alpha must lie in (0, 1), got " +
                         std::to_string(alpha));
  if (1.0 - alpha < kIllConditionedGap)
    warn(std::string(who) + ": alpha=" + std::to_string(alpha) +
         " is close to 1; the Katz system is ill-conditioned");
}

Vector row_sums(const Matrix& m) {
  const Vector ones(m.cols(), 1.0);
  return kernels::matvec(m, ones);
}

double sum_of(std::span<const double> v) { return active_kernels().sum(v.data(), v.size()); }

}  // namespace

std::string_view to_string(SolverMethod method) noexcept {
  switch (method) {
    case SolverMethod::PowerIteration:
      return "power";
    case SolverMethod::LinearSystem:
      return "linear";
    case SolverMethod::KatzClosedForm:
      return "katz-dense";
    case SolverMethod::KatzBlockInverse:
      return "katz-block";
  }
  return "unknown";
}

std::optional<SolverMethod> parse_solver_method(std::string_view name) noexcept {
  for (SolverMethod m : {SolverMethod::PowerIteration, SolverMethod::LinearSystem,
                         SolverMethod::KatzClosedForm, SolverMethod::KatzBlockInverse})
    if (to_string(m) == name) return m;
  if (name == "eigen") return SolverMethod::KatzBlockInverse;
  return std::nullopt;
}

void SolverConfig::validate() const {
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw ParameterError("solver: alpha must lie in (0, 1)");
  if (!(tol > 0.0)) throw ParameterError("solver: tol must be positive");
  if (max_iter <= 0) throw ParameterError("solver: max_iter must be positive");
}

void set_warning_handler(WarningHandler handler) {
  std::lock_guard lock(g_warning_mutex);
  g_warning_handler = std::move(handler);
}

CentralityPair stationary_power(const TransitionPair& pair, double tol, int max_iter) {
  if (!(tol > 0.0)) throw ParameterError("stationary_power: tol must be positive");
  if (max_iter <= 0) throw ParameterError("stationary_power: max_iter must be positive");

  const KernelTable& k = active_kernels();
  const std::size_t ns = pair.support_size();
  const std::size_t nq = pair.query_size();
  const Matrix& p_sq = pair.p_sq();
  const Matrix& p_qs = pair.p_qs();

  Vector v(ns, 1.0 / static_cast<double>(ns));
  Vector next(ns);
  Vector mid(nq);
  double step = 0.0;
  for (int iter = 1; iter <= max_iter; ++iter) {
    k.gemv(nq, ns, p_qs.data(), nq, v.data(), mid.data());
    k.gemv(ns, nq, p_sq.data(), ns, mid.data(), next.data());
    k.scale(1.0 / k.sum(next.data(), ns), next.data(), ns);
    step = 0.0;
    for (std::size_t i = 0; i < ns; ++i) step = std::max(step, std::abs(next[i] - v[i]));
    v.swap(next);
    if (step < tol) return {v, kernels::matvec(p_qs, v)};
  }
  throw ConvergenceError("stationary_power: no convergence after " + std::to_string(max_iter) +
                             " iterations (last step " + std::to_string(step) + ")",
                         step, max_iter);
}

CentralityPair stationary_linear(const TransitionPair& pair) {
  const std::size_t ns = pair.support_size();
  const Matrix composed = kernels::matmul(pair.p_sq(), pair.p_qs());

  Matrix stacked(ns + 1, ns);
  for (std::size_t j = 0; j < ns; ++j) {
    auto col = stacked.col(j);
    std::copy(composed.col(j).begin(), composed.col(j).end(), col.begin());
    col[j] -= 1.0;
    col[ns] = 1.0;
  }
  Vector rhs(ns + 1, 0.0);
  rhs[ns] = 1.0;

  Vector pi_s;
  try {
    pi_s = least_squares(stacked, rhs);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("stationary_linear: rank-deficient system (") + e.what() +
                         ")");
  }
  const double constraint = std::abs(sum_of(pi_s) - 1.0);
  if (constraint > kStochasticConstraintTolerance)
    throw NumericalError("stationary_linear: probability constraint residual " +
                         std::to_string(constraint));
  Vector pi_q = kernels::matvec(pair.p_qs(), pi_s);
  return {std::move(pi_s), std::move(pi_q)};
}

RawCentrality katz_closed_form(const TransitionPair& pair, double alpha) {
  check_alpha(alpha, "katz_closed_form");
  const Matrix p = assemble_dense(pair);
  const std::size_t n = p.rows();

  Matrix system(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) system(i, j) = -alpha * p(i, j);
    system(j, j) += 1.0;
  }
  // (I - aP)^{-1} e - e == (I - aP)^{-1} (a P e); the right-hand form avoids
  // cancelling against e when alpha is small.
  Vector rhs = row_sums(p);
  for (double& v : rhs) v *= alpha;
  const LuFactorization lu(std::move(system));
  lu.solve_in_place(rhs);
  return {std::move(rhs), pair.support_size()};
}

RawCentrality katz_block_inverse(const TransitionPair& pair, double alpha) {
  check_alpha(alpha, "katz_block_inverse");
  const KernelTable& k = active_kernels();
  const std::size_t ns = pair.support_size();
  const std::size_t nq = pair.query_size();
  const Matrix& p_sq = pair.p_sq();
  const Matrix& p_qs = pair.p_qs();
  const double alpha2 = alpha * alpha;

  // Delta = I - a^2 P_qs P_sq, the r x r Schur complement of I - aP.
  Matrix delta = Matrix::identity(nq);
  k.gemm(nq, nq, ns, -alpha2, p_qs.data(), nq, p_sq.data(), ns, 1.0, delta.data(), nq);
  const LuFactorization lu(std::move(delta));

  // Support rows of ((I - aP)^{-1} - I) e:
  //   a^2 P_sq D^-1 P_qs e + a P_sq D^-1 e = a P_sq D^-1 (e + a P_qs e)
  Vector u = row_sums(p_qs);
  for (double& v : u) v = 1.0 + alpha * v;
  lu.solve_in_place(u);
  Vector x_s = kernels::matvec(p_sq, u);
  k.scale(alpha, x_s.data(), ns);

  // Query rows: a D^-1 P_qs e + D^-1 e - e = a D^-1 P_qs (e + a P_sq e)
  Vector w = row_sums(p_sq);
  for (double& v : w) v = 1.0 + alpha * v;
  Vector x_q = kernels::matvec(p_qs, w);
  lu.solve_in_place(x_q);
  k.scale(alpha, x_q.data(), nq);

  RawCentrality raw{std::move(x_s), ns};
  raw.x.insert(raw.x.end(), x_q.begin(), x_q.end());
  return raw;
}

CentralityPair eigen_approx(const TransitionPair& pair, double alpha) {
  if (!(alpha > 0.9) || !(alpha < 1.0))
    throw ParameterError("eigen_approx: alpha must lie in (0.9, 1), got " + std::to_string(alpha));
  return single_mode_normalize(katz_block_inverse(pair, alpha));
}

CentralityPair single_mode_normalize(const RawCentrality& raw) {
  if (raw.support_size == 0 || raw.support_size >= raw.x.size())
    throw DimensionError("single_mode_normalize: partition index out of range");
  const std::span<const double> all(raw.x);
  const auto s = all.first(raw.support_size);
  const auto q = all.subspan(raw.support_size);
  const double s_total = sum_of(s);
  const double q_total = sum_of(q);
  if (!(s_total > 0.0) || !(q_total > 0.0))
    throw DegenerateError("single_mode_normalize: a centrality slice sums to zero");

  CentralityPair out{Vector(s.begin(), s.end()), Vector(q.begin(), q.end())};
  const KernelTable& k = active_kernels();
  k.scale(1.0 / s_total, out.pi_s.data(), out.pi_s.size());
  k.scale(1.0 / q_total, out.pi_q.data(), out.pi_q.size());
  return out;
}

CentralityPair solve_centrality(const TransitionPair& pair, const SolverConfig& config) {
  config.validate();
  switch (config.method) {
    case SolverMethod::PowerIteration:
      return stationary_power(pair, config.tol, config.max_iter);
    case SolverMethod::LinearSystem:
      return stationary_linear(pair);
    case SolverMethod::KatzClosedForm:
      return single_mode_normalize(katz_closed_form(pair, config.alpha));
    case SolverMethod::KatzBlockInverse:
      return single_mode_normalize(katz_block_inverse(pair, config.alpha));
  }
  throw ParameterError("solve_centrality: unknown method");
}

}  // namespace mcl
