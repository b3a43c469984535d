#include "mcl/walker.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <thread>

#include "mcl/error.hpp"
#include "mcl/rng.hpp"

namespace mcl {
namespace {

constexpr std::uint64_t kTrialsPerChunk = 64;
constexpr double kKatzTailBound = 1e-4;

// Per-column cumulative distributions for inverse-CDF sampling.
class ColumnSampler {
 public:
  explicit ColumnSampler(const Matrix& m) : rows_(m.rows()), cum_(m.rows(), m.cols()) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      auto src = m.col(j);
      auto dst = cum_.col(j);
      std::partial_sum(src.begin(), src.end(), dst.begin());
      dst.back() = 1.0;
    }
  }

  std::size_t rows() const noexcept { return rows_; }

  std::size_t sample(std::size_t column, double u) const noexcept {
    const auto c = cum_.col(column);
    const auto it = std::upper_bound(c.begin(), c.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - c.begin()), rows_ - 1);
  }

 private:
  std::size_t rows_;
  Matrix cum_;
};

class Walk {
 public:
  explicit Walk(const TransitionPair& pair)
      : support_(pair.support_size()), to_support_(pair.p_sq()), to_query_(pair.p_qs()) {}

  std::size_t states() const noexcept { return support_ + query_count(); }
  std::size_t support_count() const noexcept { return support_; }
  std::size_t query_count() const noexcept { return to_query_.rows(); }

  std::size_t start(Stream& rng) const noexcept { return rng.index(states()); }

  std::size_t step(std::size_t state, Stream& rng) const noexcept {
    const double u = rng.uniform();
    if (state < support_) return support_ + to_query_.sample(state, u);
    return to_support_.sample(state - support_, u);
  }

 private:
  std::size_t support_;
  ColumnSampler to_support_;
  ColumnSampler to_query_;
};

unsigned worker_count(unsigned requested, std::uint64_t chunks) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(chunks, 1)));
}

// Runs body(worker, chunk) for every chunk; chunk order within a worker is
// unspecified, so callers reduce by chunk index or with commutative integer sums.
void for_each_chunk(std::uint64_t chunks, unsigned workers,
                    const std::function<void(unsigned, std::uint64_t)>& body) {
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) body(0, c);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::uint64_t c = next++; c < chunks; c = next++) body(w, c);
    });
}

std::uint64_t chunk_count(std::uint64_t trials) {
  return (trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
}

}  // namespace

WalkStats simulate(const TransitionPair& pair, std::uint64_t steps, std::uint64_t trials,
                   std::uint64_t seed, unsigned threads) {
  if (steps == 0 || trials == 0) throw ParameterError("simulate: steps and trials must be >= 1");
  const Walk walk(pair);
  const std::size_t n_states = walk.states();
  const std::uint64_t chunks = chunk_count(trials);
  const unsigned workers = worker_count(threads, chunks);

  std::vector<std::vector<std::uint64_t>> counts(workers, std::vector<std::uint64_t>(n_states));
  for_each_chunk(chunks, workers, [&](unsigned w, std::uint64_t c) {
    auto& local = counts[w];
    const std::uint64_t end = std::min(trials, (c + 1) * kTrialsPerChunk);
    for (std::uint64_t t = c * kTrialsPerChunk; t < end; ++t) {
      Stream rng(seed, t);
      std::size_t state = walk.start(rng);
      for (std::uint64_t s = 0; s < steps; ++s) {
        state = walk.step(state, rng);
        ++local[state];
      }
    }
  });

  std::vector<std::uint64_t> total(n_states, 0);
  for (const auto& local : counts)
    for (std::size_t i = 0; i < n_states; ++i) total[i] += local[i];

  WalkStats stats;
  const auto split = total.begin() + static_cast<std::ptrdiff_t>(walk.support_count());
  stats.visits_support.assign(total.begin(), split);
  stats.visits_query.assign(split, total.end());
  stats.steps = steps;
  stats.trials = trials;
  stats.rng_seed = seed;
  return stats;
}

std::vector<std::size_t> walk_trace(const TransitionPair& pair, std::uint64_t steps,
                                    std::uint64_t seed, std::uint64_t trial) {
  const Walk walk(pair);
  Stream rng(seed, trial);
  std::vector<std::size_t> trace;
  trace.reserve(steps + 1);
  trace.push_back(walk.start(rng));
  for (std::uint64_t s = 0; s < steps; ++s) trace.push_back(walk.step(trace.back(), rng));
  return trace;
}

ClassDistribution estimate_class_distribution(const WalkStats& stats, std::size_t n_classes) {
  if (n_classes == 0 || stats.visits_support.size() % n_classes != 0)
    throw DimensionError("estimate_class_distribution: support visits do not split into " +
                         std::to_string(n_classes) + " classes");
  const std::size_t r = stats.visits_support.size() / n_classes;
  std::vector<std::uint64_t> per_class(n_classes, 0);
  for (std::size_t s = 0; s < stats.visits_support.size(); ++s)
    per_class[s / r] += stats.visits_support[s];
  const std::uint64_t total = std::accumulate(per_class.begin(), per_class.end(), std::uint64_t{0});
  if (total == 0) throw DegenerateError("estimate_class_distribution: no support visits recorded");
  ClassDistribution dist{Vector(n_classes)};
  for (std::size_t c = 0; c < n_classes; ++c)
    dist.probs[c] = static_cast<double>(per_class[c]) / static_cast<double>(total);
  return dist;
}

Vector support_frequencies(const WalkStats& stats) {
  const std::uint64_t total =
      std::accumulate(stats.visits_support.begin(), stats.visits_support.end(), std::uint64_t{0});
  if (total == 0) throw DegenerateError("support_frequencies: no support visits recorded");
  Vector out(stats.visits_support.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<double>(stats.visits_support[i]) / static_cast<double>(total);
  return out;
}

ClassDistribution estimate_katz_accessibility(const TransitionPair& pair, std::size_t n_classes,
                                              double alpha, std::uint64_t horizon,
                                              std::uint64_t trials, std::uint64_t seed,
                                              unsigned threads) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw ParameterError("estimate_katz_accessibility: alpha must lie in (0, 1)");
  if (trials == 0) throw ParameterError("estimate_katz_accessibility: trials must be >= 1");
  if (std::pow(alpha, static_cast<double>(horizon)) / (1.0 - alpha) >= kKatzTailBound)
    throw ParameterError("estimate_katz_accessibility: horizon " + std::to_string(horizon) +
                         " leaves a tail above 1e-4 at alpha=" + std::to_string(alpha));
  if (n_classes == 0 || pair.support_size() % n_classes != 0)
    throw DimensionError("estimate_katz_accessibility: support does not split into classes");

  const Walk walk(pair);
  const std::size_t r = pair.support_size() / n_classes;
  const std::uint64_t chunks = chunk_count(trials);
  const unsigned workers = worker_count(threads, chunks);

  // One partial sum per chunk, reduced in chunk order for reproducibility.
  std::vector<Vector> partial(chunks, Vector(n_classes, 0.0));
  for_each_chunk(chunks, workers, [&](unsigned, std::uint64_t c) {
    Vector& acc = partial[c];
    const std::uint64_t end = std::min(trials, (c + 1) * kTrialsPerChunk);
    for (std::uint64_t t = c * kTrialsPerChunk; t < end; ++t) {
      Stream rng(seed, t);
      std::size_t state = walk.start(rng);
      double weight = 1.0;
      for (std::uint64_t s = 0; s < horizon; ++s) {
        state = walk.step(state, rng);
        weight *= alpha;
        if (state < walk.support_count()) acc[state / r] += weight;
      }
    }
  });

  ClassDistribution dist{Vector(n_classes, 0.0)};
  for (const Vector& p : partial)
    for (std::size_t c = 0; c < n_classes; ++c) dist.probs[c] += p[c];
  const double total = std::accumulate(dist.probs.begin(), dist.probs.end(), 0.0);
  if (!(total > 0.0)) throw DegenerateError("estimate_katz_accessibility: no support visits");
  for (double& v : dist.probs) v /= total;
  return dist;
}

}  // namespace mcl
