#pragma once

// Feature-count baselines: the worst-case feature count bound, the
// Hoeffding-style sample-complexity bounds inverted to EVD bounds, and the
// projection apprenticeship-learning algorithm used to produce evaluation
// policies.

#include "irlbound/birl.hpp"
#include "irlbound/mdp.hpp"

#include <vector>

namespace irlbound {

struct FeatureCountEstimate {
  Eigen::VectorXd mu_hat;
  std::size_t n_demos = 0;
  double gamma = 0.0;
};

/// Average over full trajectories (duplicates kept) of sum_t gamma^t phi(s_t).
FeatureCountEstimate empirical_feature_counts(const DemonstrationSet& demos,
                                              const Eigen::MatrixXd& features,
                                              double gamma);

/// ||mu_hat - mu_eval||_inf.
double wfcb(const FeatureCountEstimate& mu_hat, const Eigen::VectorXd& mu_eval);
/// ||mu_hat - mu_eval||_2.
double two_norm_fcb(const FeatureCountEstimate& mu_hat,
                    const Eigen::VectorXd& mu_eval);

/// (3 / (1 - gamma)) sqrt((2 / m) ln(2k / delta)).
double syed_epsilon(std::size_t m, std::size_t k, double gamma, double delta);
/// (1 / (1 - gamma)) sqrt((2k / m) ln(2k / delta)).
double abbeel_epsilon(std::size_t m, std::size_t k, double gamma, double delta);

struct ProjectionResult {
  /// Iterate policy whose feature counts are closest to mu_hat.
  Policy policy;
  /// ||mu_hat - mu(policy)||_2.
  double distance = 0.0;
  /// Best-so-far distance after each iteration (nonincreasing).
  std::vector<double> best_distances;
  /// ||mu_hat - mu_bar|| of the projected point after each iteration.
  std::vector<double> projection_distances;
};

/// Projection algorithm. Starts from the all-zeros-action policy, then
/// alternates optimal solves for w = mu_hat - mu_bar with orthogonal
/// projection of mu_hat onto the segment [mu_bar, mu(pi_i)].
ProjectionResult projection_algorithm(const TabularMdp& mdp,
                                      const FeatureCountEstimate& mu_hat,
                                      std::size_t max_iters,
                                      double tol = 1e-6);

/// Changes the action at exactly `x` states drawn without replacement to a
/// uniformly drawn non-optimal action.
Policy perturbed_policy(const Policy& pi_opt, std::size_t x,
                        std::size_t n_actions, Rng& rng);

}  // namespace irlbound
