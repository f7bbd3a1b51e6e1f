#include "irlbound/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace irlbound {

FeatureCountEstimate empirical_feature_counts(const DemonstrationSet& demos,
                                              const Eigen::MatrixXd& features,
                                              double gamma) {
  if (demos.trajectories().empty()) {
    throw InvalidInput("empirical_feature_counts: no demonstrations");
  }
  FeatureCountEstimate est;
  est.mu_hat = Eigen::VectorXd::Zero(features.cols());
  est.n_demos = demos.size();
  est.gamma = gamma;
  for (const auto& traj : demos.trajectories()) {
    double discount = 1.0;
    for (const auto& [s, a] : traj) {
      if (s >= static_cast<std::size_t>(features.rows())) {
        throw InvalidInput("empirical_feature_counts: state out of range");
      }
      est.mu_hat += discount * features.row(static_cast<Eigen::Index>(s)).transpose();
      discount *= gamma;
    }
  }
  est.mu_hat /= static_cast<double>(demos.size());
  return est;
}

namespace {

Eigen::VectorXd checked_difference(const FeatureCountEstimate& mu_hat,
                                   const Eigen::VectorXd& mu_eval) {
  if (mu_hat.mu_hat.size() != mu_eval.size()) {
    throw InvalidInput("feature count bound: dimension mismatch");
  }
  return mu_hat.mu_hat - mu_eval;
}

}  // namespace

double wfcb(const FeatureCountEstimate& mu_hat, const Eigen::VectorXd& mu_eval) {
  return checked_difference(mu_hat, mu_eval).lpNorm<Eigen::Infinity>();
}

double two_norm_fcb(const FeatureCountEstimate& mu_hat,
                    const Eigen::VectorXd& mu_eval) {
  return checked_difference(mu_hat, mu_eval).norm();
}

double syed_epsilon(std::size_t m, std::size_t k, double gamma, double delta) {
  if (m == 0 || k == 0) throw InvalidInput("syed_epsilon: m and k must be positive");
  const double md = static_cast<double>(m);
  const double kd = static_cast<double>(k);
  return 3.0 / (1.0 - gamma) * std::sqrt(2.0 / md * std::log(2.0 * kd / delta));
}

double abbeel_epsilon(std::size_t m, std::size_t k, double gamma, double delta) {
  if (m == 0 || k == 0) throw InvalidInput("abbeel_epsilon: m and k must be positive");
  const double md = static_cast<double>(m);
  const double kd = static_cast<double>(k);
  return 1.0 / (1.0 - gamma) *
         std::sqrt(2.0 * kd / md * std::log(2.0 * kd / delta));
}

ProjectionResult projection_algorithm(const TabularMdp& mdp,
                                      const FeatureCountEstimate& mu_hat,
                                      std::size_t max_iters, double tol) {
  if (max_iters == 0) throw InvalidInput("projection_algorithm: max_iters must be >= 1");
  if (static_cast<std::size_t>(mu_hat.mu_hat.size()) != mdp.n_features()) {
    throw InvalidInput("projection_algorithm: feature dimension mismatch");
  }
  const Eigen::VectorXd& target = mu_hat.mu_hat;

  ProjectionResult result{
      Policy::deterministic(std::vector<std::size_t>(mdp.n_states(), 0)), 0.0,
      {}, {}};
  Eigen::VectorXd mu_bar = expected_feature_counts(mdp, result.policy);
  result.distance = (target - mu_bar).norm();

  for (std::size_t i = 0; i < max_iters; ++i) {
    const Eigen::VectorXd direction = target - mu_bar;
    const double t = direction.norm();
    result.projection_distances.push_back(t);
    if (t <= tol) break;

    const RewardWeights w = RewardWeights::normalized(direction);
    Policy pi = optimal_policy(policy_iteration(mdp, w));
    const Eigen::VectorXd mu = expected_feature_counts(mdp, pi);
    const double d = (target - mu).norm();
    if (d < result.distance) {
      result.distance = d;
      result.policy = std::move(pi);
    }
    result.best_distances.push_back(result.distance);

    const Eigen::VectorXd step = mu - mu_bar;
    const double denom = step.squaredNorm();
    if (denom == 0.0) break;
    const double lambda = std::clamp(step.dot(direction) / denom, 0.0, 1.0);
    mu_bar += lambda * step;
  }
  return result;
}

Policy perturbed_policy(const Policy& pi_opt, std::size_t x,
                        std::size_t n_actions, Rng& rng) {
  if (!pi_opt.is_deterministic()) {
    throw InvalidInput("perturbed_policy: policy must be deterministic");
  }
  const std::size_t n = pi_opt.n_states();
  if (x > n) throw InvalidInput("perturbed_policy: x exceeds state count");
  if (x > 0 && n_actions < 2) {
    throw InvalidInput("perturbed_policy: need at least two actions");
  }
  std::vector<std::size_t> states(n);
  std::iota(states.begin(), states.end(), 0);
  // Partial Fisher-Yates: the first x entries are a uniform sample.
  for (std::size_t i = 0; i < x; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(states[i], states[pick(rng)]);
  }
  std::vector<std::size_t> actions = pi_opt.actions();
  std::uniform_int_distribution<std::size_t> other(0, n_actions - 2);
  for (std::size_t i = 0; i < x; ++i) {
    const std::size_t s = states[i];
    const std::size_t r = other(rng);
    actions[s] = r < actions[s] ? r : r + 1;
  }
  return Policy::deterministic(std::move(actions));
}

}  // namespace irlbound
