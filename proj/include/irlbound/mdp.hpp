#pragma once

// Tabular MDPs with linear state rewards R(s) = w . phi(s), and the exact
// solvers used throughout: value iteration, policy iteration, fixed-policy
// evaluation and discounted feature occupancy.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <list>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace irlbound {

using Rng = std::mt19937_64;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDefaultSolverTol = 1e-8;

struct Transition {
  std::size_t next;
  double prob;
};

/// Finite discounted MDP without a reward. Transitions are stored sparsely,
/// one row per (state, action); features are one row per state.
class TabularMdp {
 public:
  using Row = std::vector<Transition>;

  TabularMdp(std::size_t n_states, std::size_t n_actions, double gamma,
             std::vector<Row> rows, Eigen::VectorXd initial_dist,
             Eigen::MatrixXd features);

  /// Builds from a dense tensor indexed [state][action][next_state].
  static TabularMdp from_dense(
      double gamma,
      const std::vector<std::vector<std::vector<double>>>& transitions,
      Eigen::VectorXd initial_dist, Eigen::MatrixXd features);

  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  std::size_t n_features() const {
    return static_cast<std::size_t>(features_.cols());
  }
  double gamma() const { return gamma_; }

  const Row& row(std::size_t s, std::size_t a) const {
    return rows_[s * n_actions_ + a];
  }
  double transition(std::size_t s, std::size_t a, std::size_t next) const;
  const Eigen::VectorXd& initial_dist() const { return initial_dist_; }
  const Eigen::MatrixXd& features() const { return features_; }

  /// States with nonzero initial probability, in index order.
  std::vector<std::size_t> initial_support() const;

  std::size_t sample_next(std::size_t s, std::size_t a, Rng& rng) const;
  std::size_t sample_initial(Rng& rng) const;

 private:
  std::size_t n_states_;
  std::size_t n_actions_;
  double gamma_;
  std::vector<Row> rows_;
  Eigen::VectorXd initial_dist_;
  Eigen::MatrixXd features_;
};

/// Feature weights. Samplers and normalized constructors put w on the L1
/// unit sphere; the worst-case analysis also admits ||w||_1 <= 1.
class RewardWeights {
 public:
  enum class Regime { kUnitSphere, kUnitBall };

  /// Divides by the L1 norm. Throws on a zero or non-finite vector.
  static RewardWeights normalized(Eigen::VectorXd w);
  /// Requires ||w||_1 = 1 within 1e-9.
  static RewardWeights unit(Eigen::VectorXd w);
  /// Any finite vector; used for zero rewards and solver internals.
  static RewardWeights unnormalized(Eigen::VectorXd w);

  const Eigen::VectorXd& values() const { return w_; }
  double operator[](std::size_t i) const {
    return w_[static_cast<Eigen::Index>(i)];
  }
  std::size_t size() const { return static_cast<std::size_t>(w_.size()); }
  Regime regime() const { return regime_; }
  bool on_unit_sphere() const;

 private:
  RewardWeights(Eigen::VectorXd w, Regime regime)
      : w_(std::move(w)), regime_(regime) {}
  Eigen::VectorXd w_;
  Regime regime_;
};

class Policy {
 public:
  enum class Kind { kDeterministic, kStochastic };

  static Policy deterministic(std::vector<std::size_t> actions);
  /// One row per state, one column per action.
  static Policy stochastic(Eigen::MatrixXd probs);
  static Policy uniform(std::size_t n_states, std::size_t n_actions);

  Kind kind() const { return kind_; }
  bool is_deterministic() const { return kind_ == Kind::kDeterministic; }
  std::size_t n_states() const;
  /// Deterministic policies only.
  std::size_t action(std::size_t s) const { return actions_.at(s); }
  const std::vector<std::size_t>& actions() const { return actions_; }
  const Eigen::MatrixXd& probs() const { return probs_; }
  double prob(std::size_t s, std::size_t a) const;

  void validate_for(const TabularMdp& mdp) const;

  bool operator==(const Policy& other) const;

 private:
  Kind kind_ = Kind::kDeterministic;
  std::vector<std::size_t> actions_;
  Eigen::MatrixXd probs_;
};

struct ValueFunction {
  Eigen::VectorXd v;
  Eigen::MatrixXd q;
};

/// R = Phi w. Throws InvalidInput on dimension mismatch or non-finite entries.
Eigen::VectorXd state_rewards(const TabularMdp& mdp, const RewardWeights& w);

/// Q(s,a) = R(s) + gamma * sum_s' T(s,a,s') v(s').
Eigen::MatrixXd q_from_values(const TabularMdp& mdp,
                              const Eigen::VectorXd& rewards,
                              const Eigen::VectorXd& v);

ValueFunction value_iteration(const TabularMdp& mdp, const RewardWeights& w,
                              double tol = kDefaultSolverTol);

/// Howard policy iteration with exact evaluation. Starts from `initial` when
/// given, else from the greedy policy of the immediate reward.
ValueFunction policy_iteration(const TabularMdp& mdp, const RewardWeights& w,
                               double tol = kDefaultSolverTol,
                               const Policy* initial = nullptr);

/// Greedy deterministic policy; ties go to the lowest action index.
Policy optimal_policy(const ValueFunction& vf);
std::vector<std::size_t> greedy_actions(const Eigen::MatrixXd& q);

ValueFunction policy_evaluation(const TabularMdp& mdp, const RewardWeights& w,
                                const Policy& pi,
                                double tol = kDefaultSolverTol);

double policy_value(const TabularMdp& mdp, const RewardWeights& w,
                    const Policy& pi);

/// mu(pi) = E[sum_t gamma^t phi(s_t)] from the initial distribution, by one
/// occupancy-measure linear solve.
Eigen::VectorXd expected_feature_counts(const TabularMdp& mdp,
                                        const Policy& pi,
                                        double tol = kDefaultSolverTol);

/// Discounted state occupancy d with d^T = d0^T (I - gamma P_pi)^-1.
Eigen::VectorXd state_occupancy(const TabularMdp& mdp, const Policy& pi);

/// Per-state feature counts M = (I - gamma P_pi)^-1 Phi, so V^pi_w = M w for
/// every w.
Eigen::MatrixXd state_feature_counts(const TabularMdp& mdp, const Policy& pi);

namespace detail {
class PolicySystem;
}

/// Incremental optimal-Q solver for a slowly moving reward: keeps the last
/// optimal policy and its state feature counts, and repairs the policy with a
/// few policy-iteration sweeps when the reward changes.
///
/// Feature counts of a policy that differs from a factorized base policy in
/// r states come from a rank-r Woodbury correction; the base is refactored
/// once r exceeds max_rank(). Feature counts of recently seen policies are
/// kept in a small LRU cache, since chains often flip back and forth.
class WarmStartSolver {
 public:
  WarmStartSolver(const TabularMdp& mdp, std::size_t max_repair_sweeps,
                  double tol);
  ~WarmStartSolver();
  WarmStartSolver(const WarmStartSolver&) = delete;
  WarmStartSolver& operator=(const WarmStartSolver&) = delete;

  /// Optimal Q for `w`.
  const Eigen::MatrixXd& solve(const RewardWeights& w);
  const Policy& policy() const { return policy_; }
  /// State feature counts of policy(); V*(s) = (M w)(s).
  const Eigen::MatrixXd& feature_counts() const { return feature_counts_; }
  std::size_t policy_solves() const { return policy_solves_; }
  std::size_t fallbacks() const { return fallbacks_; }
  /// Full factorizations performed so far.
  std::size_t factorizations() const { return factorizations_; }
  std::size_t max_rank() const { return max_rank_; }

 private:
  void adopt(std::vector<std::size_t> actions);
  void compute_counts(const std::vector<std::size_t>& actions);
  void rebase(const std::vector<std::size_t>& actions);
  const Eigen::VectorXd& base_inverse_column(std::size_t s);

  const TabularMdp& mdp_;
  std::size_t max_sweeps_;
  double tol_;
  Policy policy_;
  Eigen::MatrixXd feature_counts_;
  Eigen::MatrixXd q_;
  std::size_t policy_solves_ = 0;
  std::size_t fallbacks_ = 0;
  std::size_t factorizations_ = 0;
  std::size_t max_rank_;

  std::vector<std::size_t> base_actions_;
  std::unique_ptr<detail::PolicySystem> base_system_;
  Eigen::MatrixXd base_counts_;
  /// Columns of the base inverse, filled on first use.
  std::vector<Eigen::VectorXd> base_columns_;

  static constexpr std::size_t kCacheSize = 64;
  using CacheList = std::list<std::pair<std::vector<std::size_t>, Eigen::MatrixXd>>;
  CacheList cache_;
  std::map<std::vector<std::size_t>, CacheList::iterator> cache_index_;
};

/// Sampling interface used by model-free learning.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;
  virtual std::size_t n_states() const = 0;
  virtual std::size_t n_actions() const = 0;
  virtual double gamma() const = 0;
  virtual std::size_t sample_initial(Rng& rng) const = 0;
  virtual std::size_t sample_next(std::size_t s, std::size_t a,
                                  Rng& rng) const = 0;
  virtual Eigen::VectorXd reward_features(std::size_t s) const = 0;
};

class TabularGenerativeModel final : public GenerativeModel {
 public:
  explicit TabularGenerativeModel(const TabularMdp& mdp) : mdp_(mdp) {}
  std::size_t n_states() const override { return mdp_.n_states(); }
  std::size_t n_actions() const override { return mdp_.n_actions(); }
  double gamma() const override { return mdp_.gamma(); }
  std::size_t sample_initial(Rng& rng) const override {
    return mdp_.sample_initial(rng);
  }
  std::size_t sample_next(std::size_t s, std::size_t a,
                          Rng& rng) const override {
    return mdp_.sample_next(s, a, rng);
  }
  Eigen::VectorXd reward_features(std::size_t s) const override {
    return mdp_.features().row(static_cast<Eigen::Index>(s)).transpose();
  }

 private:
  const TabularMdp& mdp_;
};

struct QLearningConfig {
  std::size_t episodes = 10000;
  std::size_t horizon = 100;
  /// Start each episode from a uniformly random state instead of the
  /// model's initial distribution.
  bool exploring_starts = true;
  std::function<double(std::size_t episode)> learning_rate;
  std::function<double(std::size_t episode)> epsilon;
  std::uint64_t seed = 0;
};

/// Defaults: constant rate 0.1, epsilon decaying linearly 1.0 -> 0.05.
QLearningConfig default_q_learning_config(std::size_t episodes,
                                          std::uint64_t seed);

ValueFunction q_learning(const GenerativeModel& env, const RewardWeights& w,
                         const QLearningConfig& cfg);

}  // namespace irlbound
