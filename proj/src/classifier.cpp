#include "mcl/classifier.hpp"

#include <string>

#include "mcl/error.hpp"
#include "mcl/kernels.hpp"

namespace mcl {

ClassDistribution class_mass(std::span<const double> support_scores, std::size_t n_classes) {
  if (n_classes == 0 || support_scores.size() % n_classes != 0 || support_scores.empty())
    throw DimensionError("class_mass: " + std::to_string(support_scores.size()) +
                         " support entries do not split into " + std::to_string(n_classes) +
                         " equal class blocks");
  const KernelTable& k = active_kernels();
  const std::size_t r = support_scores.size() / n_classes;
  ClassDistribution dist{Vector(n_classes)};
  for (std::size_t c = 0; c < n_classes; ++c)
    dist.probs[c] = k.sum(support_scores.data() + c * r, r);
  const double total = k.sum(dist.probs.data(), n_classes);
  if (!(total > 0.0)) throw DegenerateError("class_mass: support scores sum to zero");
  k.scale(1.0 / total, dist.probs.data(), n_classes);
  return dist;
}

ClassDistribution classify_mcl(const TransitionPair& pair, std::size_t n_classes,
                               const SolverConfig& solver) {
  const CentralityPair pi = solve_centrality(pair, solver);
  return class_mass(pi.pi_s, n_classes);
}

ClassDistribution classify_mcl(const Episode& episode, Scales scales, const SolverConfig& solver) {
  return classify_mcl(episode_transitions(episode, scales), episode.n_classes(), solver);
}

ClassDistribution classify_katz(const TransitionPair& pair, std::size_t n_classes, double alpha,
                                SolverMethod method) {
  RawCentrality raw;
  switch (method) {
    case SolverMethod::KatzClosedForm:
      raw = katz_closed_form(pair, alpha);
      break;
    case SolverMethod::KatzBlockInverse:
      raw = katz_block_inverse(pair, alpha);
      break;
    default:
      throw ParameterError("classify_katz: method must be katz-dense or katz-block");
  }
  return class_mass(std::span<const double>(raw.x).first(raw.support_size), n_classes);
}

ClassDistribution classify_katz(const Episode& episode, Scales scales, double alpha,
                                SolverMethod method) {
  return classify_katz(episode_transitions(episode, scales), episode.n_classes(), alpha, method);
}

ClassDistribution truncated_accessibility(const TransitionPair& pair, std::size_t n_classes,
                                          std::uint64_t horizon) {
  if (horizon == 0) throw ParameterError("truncated_accessibility: horizon must be >= 1");
  const KernelTable& k = active_kernels();
  const std::size_t ns = pair.support_size();
  const std::size_t nq = pair.query_size();
  // (v_s, v_q) <- P (v_s, v_q) = (P_sq v_q, P_qs v_s), starting from e.
  Vector v_s(ns, 1.0), v_q(nq, 1.0), next_s(ns), next_q(nq), acc(ns, 0.0);
  for (std::uint64_t step = 0; step < horizon; ++step) {
    k.gemv(ns, nq, pair.p_sq().data(), ns, v_q.data(), next_s.data());
    k.gemv(nq, ns, pair.p_qs().data(), nq, v_s.data(), next_q.data());
    v_s.swap(next_s);
    v_q.swap(next_q);
    k.axpy(1.0, v_s.data(), acc.data(), ns);
  }
  return class_mass(acc, n_classes);
}

std::size_t predict(const ClassDistribution& dist) {
  if (dist.probs.empty()) throw DimensionError("predict: empty distribution");
  std::size_t best = 0;
  for (std::size_t c = 1; c < dist.probs.size(); ++c)
    if (dist.probs[c] > dist.probs[best]) best = c;
  return best;
}

}  // namespace mcl
