#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mcl/affinity.hpp"

namespace mcl {

struct BenchRow {
  std::string solver;
  std::size_t r = 0;
  std::size_t n = 0;  // classes
  double mean_ms = 0.0;
  double std_ms = 0.0;
  std::size_t episodes = 0;

  bool operator==(const BenchRow&) const = default;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::string env;

  bool operator==(const BenchReport&) const = default;
};

inline constexpr std::size_t kMinTimedEpisodes = 30;
inline constexpr std::size_t kMinWarmupEpisodes = 5;

struct BenchOptions {
  std::vector<std::size_t> resolutions{25, 36, 64, 100};
  std::size_t n_classes = 5;
  std::size_t n_query = 15;  // per class; each query is classified on its own
  std::size_t d = 64;
  std::size_t episodes = kMinTimedEpisodes;
  std::size_t warmup = kMinWarmupEpisodes;
  std::uint64_t seed = 0;
  double gate_tol = 2e-3;
};

/// Transition pairs of timed episode `index` at resolution r: one per query
/// image. Depends only on the options' seed and sizes.
std::vector<TransitionPair> bench_workload(const BenchOptions& options, std::size_t r,
                                           std::size_t index);

/// Solver names in report order.
const std::vector<std::string>& bench_solvers();

/// Times every solver on the same seeded synthetic episodes per resolution.
/// Episode generation and the transition matrices are built before the clock
/// starts; a timed episode is the sum over its queries of centrality plus
/// class mass. Before timing a resolution, all solvers must agree on every
/// warm-up class distribution within gate_tol, else NumericalError.
/// Throws ParameterError for zero counts, episodes < 30 or warmup < 5.
BenchReport run_bench(const BenchOptions& options);

enum class ReportFormat { Table, Json };

std::string emit_report(const BenchReport& report, ReportFormat format);

/// Inverse of emit_report(..., Json). Throws FormatError on schema violations.
BenchReport parse_report_json(std::string_view text);

}  // namespace mcl
