#pragma once

// Shared fixtures and dense reference computations for the test suites. The
// reference paths use Eigen and never call into the library's solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mcl/affinity.hpp"
#include "mcl/feature_space.hpp"
#include "mcl/rng.hpp"
#include "mcl/synthetic.hpp"

namespace mcl::test {

inline Episode random_episode(std::size_t n, std::size_t r, std::size_t d, std::uint64_t seed) {
  std::vector<FeatureMatrix> supports;
  for (std::size_t c = 0; c < n; ++c) {
    Stream rng(seed, c);
    supports.push_back(random_unit_features(d, r, rng));
  }
  Stream rng(seed, n);
  return Episode(std::move(supports), random_unit_features(d, r, rng));
}

inline TransitionPair random_pair(std::size_t n, std::size_t r, std::size_t d, std::uint64_t seed,
                                  Scales scales = kOneShotScales) {
  return episode_transitions(random_episode(n, r, d, seed), scales);
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  return Eigen::Map<const Eigen::MatrixXd>(m.data(), static_cast<Eigen::Index>(m.rows()),
                                           static_cast<Eigen::Index>(m.cols()));
}

inline Matrix from_eigen(const Eigen::MatrixXd& e) {
  Matrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  Eigen::Map<Eigen::MatrixXd>(m.data(), e.rows(), e.cols()) = e;
  return m;
}

inline Vector to_vector(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double out = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

// Dense P with support states first, built directly from the two blocks.
inline Eigen::MatrixXd dense_p(const TransitionPair& pair) {
  const auto ns = static_cast<Eigen::Index>(pair.support_size());
  const auto nq = static_cast<Eigen::Index>(pair.query_size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(ns + nq, ns + nq);
  p.topRightCorner(ns, nq) = to_eigen(pair.p_sq());
  p.bottomLeftCorner(nq, ns) = to_eigen(pair.p_qs());
  return p;
}

// Eigenvector of `m` for the eigenvalue nearest `target`, real part, scaled to unit sum.
inline Eigen::VectorXd eigenvector_near(const Eigen::MatrixXd& m, double target) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()[i] - target) < std::abs(es.eigenvalues()[best] - target)) best = i;
  Eigen::VectorXd v = es.eigenvectors().col(best).real();
  return v / v.sum();
}

// Stationary support distribution from the composed chain P_sq P_qs.
inline Vector composed_stationary(const TransitionPair& pair) {
  return to_vector(eigenvector_near(to_eigen(pair.p_sq()) * to_eigen(pair.p_qs()), 1.0));
}

// Support slice of the dense-P eigenvector at lambda = 1, renormalised.
inline Vector dense_single_mode_support(const TransitionPair& pair) {
  const Eigen::VectorXd x = eigenvector_near(dense_p(pair), 1.0);
  const Eigen::VectorXd s = x.head(static_cast<Eigen::Index>(pair.support_size()));
  return to_vector(s / s.sum());
}

// sum_{t=1}^{T} alpha^t P^t e
inline Vector truncated_katz(const TransitionPair& pair, double alpha, int horizon) {
  const Eigen::MatrixXd p = dense_p(pair);
  Eigen::VectorXd term = Eigen::VectorXd::Ones(p.rows());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(p.rows());
  for (int t = 1; t <= horizon; ++t) {
    term = alpha * (p * term);
    acc += term;
  }
  return to_vector(acc);
}

// Class shares of sum_{k=1}^{T} sum_z [P^k]_{s,z} over support states s.
inline Vector truncated_accessibility(const TransitionPair& pair, std::size_t n_classes, int horizon) {
  const Eigen::MatrixXd p = dense_p(pair);
  Eigen::VectorXd term = Eigen::VectorXd::Ones(p.rows());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(p.rows());
  for (int k = 1; k <= horizon; ++k) {
    term = p * term;
    acc += term;
  }
  const std::size_t r = pair.support_size() / n_classes;
  Vector share(n_classes, 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < pair.support_size(); ++s) {
    share[s / r] += acc[static_cast<Eigen::Index>(s)];
    total += acc[static_cast<Eigen::Index>(s)];
  }
  for (double& v : share) v /= total;
  return share;
}

inline Vector class_shares(std::span<const double> support, std::size_t n_classes) {
  const std::size_t r = support.size() / n_classes;
  Vector out(n_classes, 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < support.size(); ++s) {
    out[s / r] += support[s];
    total += support[s];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace mcl::test
