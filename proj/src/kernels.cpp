#include "irlbound/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace irlbound::kernels {

namespace {

inline double backup_entry(const TabularMdp& mdp, const Eigen::VectorXd& v,
                           std::size_t s, std::size_t a) {
  double expected = 0.0;
  for (const auto& t : mdp.row(s, a)) {
    expected += t.prob * v[static_cast<Eigen::Index>(t.next)];
  }
  return expected;
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double bellman_optimal_backup_serial(const TabularMdp& mdp,
                                     const Eigen::VectorXd& rewards,
                                     const Eigen::VectorXd& v,
                                     Eigen::VectorXd& v_out) {
  const std::size_t n = mdp.n_states();
  const double gamma = mdp.gamma();
  v_out.resize(v.size());
  double delta = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      best = std::max(best, backup_entry(mdp, v, s, a));
    }
    const auto i = static_cast<Eigen::Index>(s);
    v_out[i] = rewards[i] + gamma * best;
    delta = std::max(delta, std::abs(v_out[i] - v[i]));
  }
  return delta;
}

double bellman_optimal_backup(const TabularMdp& mdp,
                              const Eigen::VectorXd& rewards,
                              const Eigen::VectorXd& v,
                              Eigen::VectorXd& v_out) {
  const auto n = static_cast<std::int64_t>(mdp.n_states());
  const double gamma = mdp.gamma();
  const std::size_t n_actions = mdp.n_actions();
  v_out.resize(v.size());
  double delta = 0.0;
#pragma omp parallel for reduction(max : delta) schedule(static) if (n > 512)
  for (std::int64_t si = 0; si < n; ++si) {
    const auto s = static_cast<std::size_t>(si);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n_actions; ++a) {
      best = std::max(best, backup_entry(mdp, v, s, a));
    }
    const auto i = static_cast<Eigen::Index>(s);
    v_out[i] = rewards[i] + gamma * best;
    delta = std::max(delta, std::abs(v_out[i] - v[i]));
  }
  return delta;
}

void q_values_serial(const TabularMdp& mdp, const Eigen::VectorXd& rewards,
                     const Eigen::VectorXd& v, Eigen::MatrixXd& q) {
  const std::size_t n = mdp.n_states();
  q.resize(static_cast<Eigen::Index>(n),
           static_cast<Eigen::Index>(mdp.n_actions()));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) =
          rewards[static_cast<Eigen::Index>(s)] +
          mdp.gamma() * backup_entry(mdp, v, s, a);
    }
  }
}

void q_values(const TabularMdp& mdp, const Eigen::VectorXd& rewards,
              const Eigen::VectorXd& v, Eigen::MatrixXd& q) {
  const auto n = static_cast<std::int64_t>(mdp.n_states());
  const std::size_t n_actions = mdp.n_actions();
  const double gamma = mdp.gamma();
  q.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_actions));
#pragma omp parallel for schedule(static) if (n > 512)
  for (std::int64_t si = 0; si < n; ++si) {
    const auto s = static_cast<std::size_t>(si);
    for (std::size_t a = 0; a < n_actions; ++a) {
      q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) =
          rewards[static_cast<Eigen::Index>(s)] +
          gamma * backup_entry(mdp, v, s, a);
    }
  }
}

std::vector<double> evd_batch_serial(const TabularMdp& mdp,
                                     std::span<const RewardWeights> samples,
                                     const Policy& pi_eval, double tol) {
  std::vector<double> out;
  out.reserve(samples.size());
  const Eigen::VectorXd& d0 = mdp.initial_dist();
  for (const auto& w : samples) {
    const ValueFunction opt = value_iteration(mdp, w, tol);
    const ValueFunction eval = policy_evaluation(mdp, w, pi_eval, tol);
    out.push_back(d0.dot(opt.v) - d0.dot(eval.v));
  }
  return out;
}

std::vector<double> optimal_values(const TabularMdp& mdp,
                                   std::span<const RewardWeights> samples,
                                   double tol) {
  // Consecutive chain samples are close, so each fixed-size chunk is solved
  // sequentially from the previous sample's optimal policy. Chunking does not
  // depend on the thread count, which keeps results bit-identical.
  constexpr std::size_t kChunk = 32;
  std::vector<double> out(samples.size());
  const Eigen::VectorXd& d0 = mdp.initial_dist();
  const auto n_chunks =
      static_cast<std::int64_t>((samples.size() + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t chunk = 0; chunk < n_chunks; ++chunk) {
    WarmStartSolver solver(mdp, 20, tol);
    const std::size_t begin = static_cast<std::size_t>(chunk) * kChunk;
    const std::size_t end = std::min(samples.size(), begin + kChunk);
    for (std::size_t i = begin; i < end; ++i) {
      solver.solve(samples[i]);
      out[i] = d0.dot(solver.feature_counts() * samples[i].values());
    }
  }
  return out;
}

std::vector<double> evd_batch(const TabularMdp& mdp,
                              std::span<const RewardWeights> samples,
                              const Policy& pi_eval, double tol) {
  pi_eval.validate_for(mdp);
  const Eigen::VectorXd mu_eval = expected_feature_counts(mdp, pi_eval, tol);
  std::vector<double> out = optimal_values(mdp, samples, tol);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out[i] -= mu_eval.dot(samples[i].values());
  }
  return out;
}

}  // namespace irlbound::kernels
