#include "irlbound/policy_improvement.hpp"

#include "irlbound/kernels.hpp"

#include <iostream>
#include <limits>

namespace irlbound {

namespace {

BoundReport bound_for(const TabularMdp& mdp, const Eigen::MatrixXd& weights,
                      const std::vector<double>& v_star,
                      const std::vector<std::size_t>& actions, double alpha,
                      double delta) {
  const Eigen::VectorXd mu =
      expected_feature_counts(mdp, Policy::deterministic(actions));
  const Eigen::VectorXd values = weights * mu;
  EvdSamples z;
  z.z.resize(v_star.size());
  for (std::size_t i = 0; i < v_star.size(); ++i) {
    z.z[i] = v_star[i] - values[static_cast<Eigen::Index>(i)];
  }
  return var_bound(z, alpha, delta);
}

}  // namespace

HillClimbResult var_hill_climb(const TabularMdp& mdp, const PosteriorChain& chain,
                               const Policy& pi_init, double alpha, double delta,
                               double tol, std::size_t max_iters) {
  if (chain.samples.empty()) throw InvalidInput("var_hill_climb: empty chain");
  if (pi_init.kind() != Policy::Kind::kDeterministic) {
    throw InvalidInput("var_hill_climb: initial policy must be deterministic");
  }
  pi_init.validate_for(mdp);

  const std::vector<double> v_star =
      kernels::optimal_values(mdp, chain.samples, tol);
  Eigen::MatrixXd weights(static_cast<Eigen::Index>(chain.samples.size()),
                          static_cast<Eigen::Index>(mdp.n_features()));
  for (std::size_t i = 0; i < chain.samples.size(); ++i) {
    weights.row(static_cast<Eigen::Index>(i)) = chain.samples[i].values().transpose();
  }

  const std::size_t n = mdp.n_states();
  const std::size_t m = mdp.n_actions();
  std::vector<std::size_t> actions = pi_init.actions();
  HillClimbResult result{pi_init, {}, true};
  result.trajectory.push_back(bound_for(mdp, weights, v_star, actions, alpha, delta));

  for (std::size_t iter = 0;; ++iter) {
    if (iter == max_iters) {
      std::cerr << "warning: var_hill_climb stopped at the iteration cap ("
                << max_iters << ")\n";
      result.converged = false;
      break;
    }
    const double current = result.trajectory.back().bound;
    const auto n_candidates = static_cast<std::ptrdiff_t>(n * m);
    std::vector<double> bounds(n * m, std::numeric_limits<double>::infinity());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < n_candidates; ++c) {
      const auto s = static_cast<std::size_t>(c) / m;
      const auto a = static_cast<std::size_t>(c) % m;
      if (a == actions[s]) continue;
      std::vector<std::size_t> cand = actions;
      cand[s] = a;
      bounds[static_cast<std::size_t>(c)] =
          bound_for(mdp, weights, v_star, cand, alpha, delta).bound;
    }
    // Lowest index wins ties, i.e. lowest state then lowest action.
    std::size_t best = n * m;
    for (std::size_t c = 0; c < n * m; ++c) {
      if (bounds[c] < current - kStrictDecrease &&
          (best == n * m || bounds[c] < bounds[best])) {
        best = c;
      }
    }
    if (best == n * m) break;
    actions[best / m] = best % m;
    result.trajectory.push_back(bound_for(mdp, weights, v_star, actions, alpha, delta));
  }
  result.policy = Policy::deterministic(actions);
  return result;
}

}  // namespace irlbound
