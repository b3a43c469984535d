#include "mcl/synthetic.hpp"

#include <cmath>

#include "mcl/error.hpp"

namespace mcl {
namespace {

void normalize_columns(Matrix& m) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    auto c = m.col(j);
    double ss = 0.0;
    for (double v : c) ss += v * v;
    const double inv = ss > 0.0 ? 1.0 / std::sqrt(ss) : 0.0;
    for (double& v : c) v = static_cast<float>(v * inv);
  }
}

FeatureMatrix perturb(const Matrix& parts, double noise, Stream& rng) {
  Matrix m = parts;
  const double sigma = noise / std::sqrt(static_cast<double>(m.rows()));
  for (double& v : m.values()) v += sigma * rng.normal();
  normalize_columns(m);
  return FeatureMatrix(std::move(m));
}

}  // namespace

FeatureMatrix perturb_features(const FeatureMatrix& base, double noise, Stream& rng) {
  return perturb(base.matrix(), noise, rng);
}

FeatureMatrix random_unit_features(std::size_t d, std::size_t r, Stream& rng) {
  if (d == 0 || r == 0) throw ParameterError("random_unit_features: d and r must be >= 1");
  Matrix m(d, r);
  for (double& v : m.values()) v = rng.normal();
  normalize_columns(m);
  return FeatureMatrix(std::move(m));
}

SyntheticEpisode generate_episode(const SyntheticSpec& spec) {
  if (spec.n_classes == 0 || spec.k_shots == 0 || spec.d == 0 || spec.r == 0)
    throw ParameterError("generate_episode: n, k, d and r must all be >= 1");
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise))
    throw ParameterError("generate_episode: noise must be finite and non-negative");

  std::vector<Matrix> parts;
  std::vector<std::vector<FeatureMatrix>> shots(spec.n_classes);
  for (std::size_t c = 0; c < spec.n_classes; ++c) {
    Stream rng(spec.seed, c);
    parts.push_back(random_unit_features(spec.d, spec.r, rng).matrix());
    for (std::size_t k = 0; k < spec.k_shots; ++k) shots[c].push_back(perturb(parts[c], spec.noise, rng));
  }
  const std::size_t target = static_cast<std::size_t>(spec.seed % spec.n_classes);
  Stream qrng(spec.seed, spec.n_classes);
  FeatureMatrix query = perturb(parts[target], spec.noise, qrng);
  return {EpisodeFile{spec.d, spec.r, std::move(shots), std::move(query)}, target};
}

}  // namespace mcl
