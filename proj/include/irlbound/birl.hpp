#pragma once

// Bayesian IRL over linear rewards on the L1 unit sphere: softmax-of-Q
// likelihood and a PolicyWalk-style Metropolis sampler whose proposals come
// from the pairwise manifold walk.

#include "irlbound/l1_geometry.hpp"
#include "irlbound/mdp.hpp"

#include <utility>
#include <vector>

namespace irlbound {

using StateAction = std::pair<std::size_t, std::size_t>;
using Trajectory = std::vector<StateAction>;

/// Ordered trajectories plus the deduplicated (s, a) pairs the likelihood
/// consumes. Duplicates are dropped at construction, keeping first
/// occurrences in order.
class DemonstrationSet {
 public:
  DemonstrationSet() = default;
  explicit DemonstrationSet(std::vector<Trajectory> trajectories);

  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  const std::vector<StateAction>& flattened_pairs() const { return pairs_; }
  bool empty() const { return pairs_.empty(); }
  std::size_t size() const { return trajectories_.size(); }

  void validate_for(const TabularMdp& mdp) const;

  /// First `n` trajectories.
  DemonstrationSet prefix(std::size_t n) const;

 private:
  std::vector<Trajectory> trajectories_;
  std::vector<StateAction> pairs_;
};

struct BirlConfig {
  double c = 100.0;
  std::size_t n_steps = 10000;
  std::size_t burn_in = 100;
  std::size_t thin = 20;
  double step_size = kDefaultWalkStep;
  double solver_tol = kDefaultSolverTol;
  /// Policy-iteration sweeps tried from the previous optimal policy before
  /// falling back to value iteration.
  std::size_t max_repair_sweeps = 20;
  /// Fraction of steps on which the warm-started solve is cross-checked
  /// against cold value iteration.
  double verify_fraction = 0.01;
  /// The chain starts at the most likely of this many uniform sphere draws.
  std::size_t init_candidates = 1;

  void validate() const;
};

struct ChainDiagnostics {
  std::size_t policy_solves = 0;
  std::size_t fallbacks = 0;
  std::size_t factorizations = 0;
  std::size_t verified_steps = 0;
  /// Largest |V_warm - V_cold| seen on verified steps.
  double max_verify_gap = 0.0;
};

struct PosteriorChain {
  std::vector<RewardWeights> samples;
  std::vector<double> log_posteriors;
  double accept_rate = 0.0;
  ChainDiagnostics diagnostics;
};

/// sum over pairs of c Q(s,a) - logsumexp_b c Q(s,b). Always <= 0.
double log_likelihood(const DemonstrationSet& demos, double c,
                      const Eigen::MatrixXd& q);
double log_likelihood(const TabularMdp& mdp, const RewardWeights& w,
                      const DemonstrationSet& demos, double c,
                      const ValueFunction& qstar);

PosteriorChain policy_walk(const TabularMdp& mdp, const DemonstrationSet& demos,
                           const BirlConfig& cfg, Rng& rng);

/// Sample with the largest log-posterior; earliest on ties.
const RewardWeights& map_reward(const PosteriorChain& chain);
/// Coordinate mean renormalized to the unit sphere.
RewardWeights mean_reward(const PosteriorChain& chain);

}  // namespace irlbound
