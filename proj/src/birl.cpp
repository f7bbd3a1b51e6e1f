#include "irlbound/birl.hpp"

#include "irlbound/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace irlbound {

DemonstrationSet::DemonstrationSet(std::vector<Trajectory> trajectories)
    : trajectories_(std::move(trajectories)) {
  std::set<StateAction> seen;
  for (const auto& traj : trajectories_) {
    for (const auto& sa : traj) {
      if (seen.insert(sa).second) pairs_.push_back(sa);
    }
  }
}

void DemonstrationSet::validate_for(const TabularMdp& mdp) const {
  for (const auto& [s, a] : pairs_) {
    if (s >= mdp.n_states() || a >= mdp.n_actions()) {
      throw InvalidInput("demonstrations: state or action index out of range");
    }
  }
}

DemonstrationSet DemonstrationSet::prefix(std::size_t n) const {
  n = std::min(n, trajectories_.size());
  return DemonstrationSet(std::vector<Trajectory>(
      trajectories_.begin(), trajectories_.begin() + static_cast<std::ptrdiff_t>(n)));
}

void BirlConfig::validate() const {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw InvalidInput("birl: confidence c must be a nonnegative number");
  }
  if (n_steps == 0 || thin == 0) {
    throw InvalidInput("birl: n_steps and thin must be positive");
  }
  if (burn_in + thin > n_steps) {
    throw InvalidInput("birl: burn_in + thin must not exceed n_steps");
  }
  if (init_candidates == 0) throw InvalidInput("birl: init_candidates must be >= 1");
  if (!(step_size > 0.0) || !(solver_tol > 0.0)) {
    throw InvalidInput("birl: step_size and solver_tol must be positive");
  }
}

double log_likelihood(const DemonstrationSet& demos, double c,
                      const Eigen::MatrixXd& q) {
  double total = 0.0;
  for (const auto& [s, a] : demos.flattened_pairs()) {
    const auto row = q.row(static_cast<Eigen::Index>(s));
    const double top = c * row.maxCoeff();
    double sum = 0.0;
    for (Eigen::Index b = 0; b < row.size(); ++b) {
      sum += std::exp(c * row[b] - top);
    }
    const double term =
        c * row[static_cast<Eigen::Index>(a)] - (top + std::log(sum));
    total += std::min(term, 0.0);
  }
  return total;
}

double log_likelihood(const TabularMdp& mdp, const RewardWeights& w,
                      const DemonstrationSet& demos, double c,
                      const ValueFunction& qstar) {
  if (w.size() != mdp.n_features()) {
    throw InvalidInput("log_likelihood: weight dimension mismatch");
  }
  demos.validate_for(mdp);
  return log_likelihood(demos, c, qstar.q);
}

PosteriorChain policy_walk(const TabularMdp& mdp, const DemonstrationSet& demos,
                           const BirlConfig& cfg, Rng& rng) {
  cfg.validate();
  if (demos.empty()) throw InvalidInput("policy_walk: no demonstrations");
  demos.validate_for(mdp);

  const std::size_t k = mdp.n_features();
  const std::size_t chain_len = (cfg.n_steps - cfg.burn_in) / cfg.thin;
  const std::size_t verify_every =
      cfg.verify_fraction > 0.0
          ? std::max<std::size_t>(
                1, static_cast<std::size_t>(std::lround(1.0 / cfg.verify_fraction)))
          : 0;

  WarmStartSolver solver(mdp, cfg.max_repair_sweeps, cfg.solver_tol);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  WalkState state{sample_l1_sphere(k, rng), cfg.step_size};
  double current_ll =
      log_likelihood(demos, cfg.c, solver.solve(RewardWeights::unit(state.w)));
  for (std::size_t i = 1; i < cfg.init_candidates; ++i) {
    Eigen::VectorXd w = sample_l1_sphere(k, rng);
    const double ll =
        log_likelihood(demos, cfg.c, solver.solve(RewardWeights::unit(w)));
    if (ll > current_ll) {
      state.w = std::move(w);
      current_ll = ll;
    }
  }
  // Re-solve so the warm start sits at the chosen point.
  if (cfg.init_candidates > 1) solver.solve(RewardWeights::unit(state.w));

  PosteriorChain chain;
  chain.samples.reserve(chain_len);
  chain.log_posteriors.reserve(chain_len);
  std::size_t accepted = 0;
  const Eigen::VectorXd& d0 = mdp.initial_dist();

  for (std::size_t step = 0; step < cfg.n_steps; ++step) {
    Eigen::VectorXd proposal = l1_ball_walk(state, rng);
    const RewardWeights w_prop = RewardWeights::unit(proposal);
    const Eigen::MatrixXd& q = solver.solve(w_prop);
    const double prop_ll = log_likelihood(demos, cfg.c, q);

    if (verify_every != 0 && step % verify_every == 0) {
      const ValueFunction cold = value_iteration(mdp, w_prop, cfg.solver_tol);
      const double gap =
          std::abs(d0.dot(q.rowwise().maxCoeff()) - d0.dot(cold.v));
      chain.diagnostics.max_verify_gap =
          std::max(chain.diagnostics.max_verify_gap, gap);
      ++chain.diagnostics.verified_steps;
    }

    // Uniform prior: the acceptance ratio is the likelihood ratio.
    const double u = unit(rng);
    if (std::log(u) < prop_ll - current_ll) {
      state.w = std::move(proposal);
      current_ll = prop_ll;
      ++accepted;
    }
    if (step >= cfg.burn_in && (step - cfg.burn_in) % cfg.thin == 0 &&
        chain.samples.size() < chain_len) {
      chain.samples.push_back(RewardWeights::unit(state.w));
      chain.log_posteriors.push_back(current_ll);
    }
  }
  chain.accept_rate =
      static_cast<double>(accepted) / static_cast<double>(cfg.n_steps);
  chain.diagnostics.policy_solves = solver.policy_solves();
  chain.diagnostics.fallbacks = solver.fallbacks();
  chain.diagnostics.factorizations = solver.factorizations();
  return chain;
}

const RewardWeights& map_reward(const PosteriorChain& chain) {
  if (chain.samples.empty()) throw InvalidInput("map_reward: empty chain");
  std::size_t best = 0;
  for (std::size_t i = 1; i < chain.log_posteriors.size(); ++i) {
    if (chain.log_posteriors[i] > chain.log_posteriors[best]) best = i;
  }
  return chain.samples[best];
}

RewardWeights mean_reward(const PosteriorChain& chain) {
  if (chain.samples.empty()) throw InvalidInput("mean_reward: empty chain");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(chain.samples.front().size()));
  for (const auto& w : chain.samples) mean += w.values();
  mean /= static_cast<double>(chain.samples.size());
  if (mean.lpNorm<1>() == 0.0) {
    throw InvalidInput("mean_reward: chain mean is the zero vector");
  }
  return RewardWeights::normalized(std::move(mean));
}

}  // namespace irlbound
