#include "mcl/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include <fmt/format.h>
#include <json.hpp>

#include "mcl/affinity.hpp"
#include "mcl/centrality.hpp"
#include "mcl/classifier.hpp"
#include "mcl/error.hpp"
#include "mcl/kernels.hpp"
#include "mcl/linalg.hpp"
#include "mcl/rng.hpp"
#include "mcl/synthetic.hpp"

namespace mcl {
namespace {

using Solver = std::function<ClassDistribution(const TransitionPair&, std::size_t)>;

// Naive dense route: explicit (I - aP)^{-1}, then row sums minus one.
ClassDistribution dense_inverse(const TransitionPair& pair, std::size_t n_classes) {
  const Matrix p = assemble_dense(pair);
  const std::size_t n = p.rows();
  Matrix system(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) system(i, j) = -kEigenApproxAlpha * p(i, j);
    system(j, j) += 1.0;
  }
  const Matrix inv = LuFactorization(std::move(system)).inverse();
  Vector x(n, -1.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) x[i] += inv(i, j);
  return class_mass(std::span<const double>(x).first(pair.support_size()), n_classes);
}

ClassDistribution with_config(const TransitionPair& pair, std::size_t n_classes, SolverMethod m) {
  SolverConfig config;
  config.method = m;
  return classify_mcl(pair, n_classes, config);
}

struct NamedSolver {
  std::string name;
  Solver run;
};

const std::vector<NamedSolver>& solver_table() {
  static const std::vector<NamedSolver> table{
      {"dense_inverse", dense_inverse},
      {"least_squares",
       [](const TransitionPair& p, std::size_t n) { return with_config(p, n, SolverMethod::LinearSystem); }},
      {"power",
       [](const TransitionPair& p, std::size_t n) { return with_config(p, n, SolverMethod::PowerIteration); }},
      {"katz_block",
       [](const TransitionPair& p, std::size_t n) { return with_config(p, n, SolverMethod::KatzBlockInverse); }},
  };
  return table;
}

// One episode per index: N random unit-feature prototypes shared by all of
// the episode's queries, each query a fresh random unit-feature image.
std::vector<TransitionPair> make_workload(const BenchOptions& o, std::size_t r, std::size_t index) {
  const std::uint64_t seed = substream_seed(o.seed, r * 1000003ULL + index);
  std::vector<FeatureMatrix> supports;
  for (std::size_t c = 0; c < o.n_classes; ++c) {
    Stream rng(seed, c);
    supports.push_back(random_unit_features(o.d, r, rng));
  }
  std::vector<TransitionPair> pairs;
  const std::size_t n_queries = o.n_classes * o.n_query;
  for (std::size_t q = 0; q < n_queries; ++q) {
    Stream rng(seed, o.n_classes + q);
    const Episode ep(supports, random_unit_features(o.d, r, rng));
    pairs.push_back(episode_transitions(ep, kOneShotScales));
  }
  return pairs;
}

void gate(const std::vector<TransitionPair>& pairs, std::size_t n_classes, double tol,
          std::size_t r) {
  const auto& solvers = solver_table();
  for (const TransitionPair& pair : pairs) {
    const ClassDistribution ref = solvers.front().run(pair, n_classes);
    for (std::size_t s = 1; s < solvers.size(); ++s) {
      const ClassDistribution got = solvers[s].run(pair, n_classes);
      for (std::size_t c = 0; c < n_classes; ++c)
        if (std::abs(got[c] - ref[c]) > tol)
          throw NumericalError(fmt::format(
              "bench: solver {} disagrees with {} by {:.3g} on class {} at r={}", solvers[s].name,
              solvers.front().name, std::abs(got[c] - ref[c]), c, r));
    }
  }
}

double episode_ms(const Solver& solver, const std::vector<TransitionPair>& pairs,
                  std::size_t n_classes) {
  const auto start = std::chrono::steady_clock::now();
  double sink = 0.0;
  for (const TransitionPair& pair : pairs) sink += solver(pair, n_classes)[0];
  const auto stop = std::chrono::steady_clock::now();
  if (!std::isfinite(sink)) throw NumericalError("bench: non-finite class distribution");
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

std::string environment_note() {
  return fmt::format("simd={}; threads=1; compiler={}", to_string(active_kernels().level),
#if defined(__clang__)
                     "clang " __clang_version__
#elif defined(__GNUC__)
                     "gcc " __VERSION__
#else
                     "unknown"
#endif
  );
}

}  // namespace

std::vector<TransitionPair> bench_workload(const BenchOptions& options, std::size_t r,
                                           std::size_t index) {
  return make_workload(options, r, index);
}

const std::vector<std::string>& bench_solvers() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& s : solver_table()) out.push_back(s.name);
    return out;
  }();
  return names;
}

BenchReport run_bench(const BenchOptions& o) {
  if (o.resolutions.empty() || o.n_classes == 0 || o.n_query == 0 || o.d == 0)
    throw ParameterError("bench: resolutions, n, n_query and d must be non-empty / positive");
  if (std::find(o.resolutions.begin(), o.resolutions.end(), 0) != o.resolutions.end())
    throw ParameterError("bench: resolutions must be positive");
  if (o.episodes < kMinTimedEpisodes)
    throw ParameterError(fmt::format("bench: at least {} timed episodes required", kMinTimedEpisodes));
  if (o.warmup < kMinWarmupEpisodes)
    throw ParameterError(fmt::format("bench: at least {} warm-up episodes required", kMinWarmupEpisodes));

  BenchReport report;
  report.env = environment_note();
  for (std::size_t r : o.resolutions) {
    std::vector<std::vector<TransitionPair>> workload;
    workload.reserve(o.warmup + o.episodes);
    for (std::size_t e = 0; e < o.warmup + o.episodes; ++e) workload.push_back(make_workload(o, r, e));
    for (std::size_t e = 0; e < o.warmup; ++e) gate(workload[e], o.n_classes, o.gate_tol, r);

    for (const auto& solver : solver_table()) {
      for (std::size_t e = 0; e < o.warmup; ++e) episode_ms(solver.run, workload[e], o.n_classes);
      std::vector<double> times;
      for (std::size_t e = o.warmup; e < workload.size(); ++e)
        times.push_back(episode_ms(solver.run, workload[e], o.n_classes));
      double mean = 0.0;
      for (double t : times) mean += t;
      mean /= static_cast<double>(times.size());
      double var = 0.0;
      for (double t : times) var += (t - mean) * (t - mean);
      var /= static_cast<double>(times.size() - 1);
      report.rows.push_back({solver.name, r, o.n_classes, mean, std::sqrt(var), times.size()});
    }
  }
  return report;
}

std::string emit_report(const BenchReport& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const BenchRow& row : report.rows)
      j["rows"].push_back({{"solver", row.solver},
                           {"r", row.r},
                           {"n", row.n},
                           {"mean_ms", row.mean_ms},
                           {"std_ms", row.std_ms},
                           {"episodes", row.episodes}});
    j["env"] = report.env;
    return j.dump(2) + "\n";
  }
  std::string out = fmt::format("{:<14} {:>5} {:>3} {:>12} {:>10} {:>8}\n", "solver", "r", "n",
                                "mean_ms", "std_ms", "episodes");
  for (const BenchRow& row : report.rows)
    out += fmt::format("{:<14} {:>5} {:>3} {:>12.3f} {:>10.3f} {:>8}\n", row.solver, row.r, row.n,
                       row.mean_ms, row.std_ms, row.episodes);
  if (!report.env.empty()) out += "# " + report.env + "\n";
  return out;
}

BenchReport parse_report_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    BenchReport report;
    report.env = j.at("env").get<std::string>();
    for (const auto& row : j.at("rows"))
      report.rows.push_back({row.at("solver").get<std::string>(), row.at("r").get<std::size_t>(),
                             row.at("n").get<std::size_t>(), row.at("mean_ms").get<double>(),
                             row.at("std_ms").get<double>(), row.at("episodes").get<std::size_t>()});
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bench report: ") + e.what());
  }
}

}  // namespace mcl
