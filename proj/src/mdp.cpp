#include "irlbound/mdp.hpp"

#include "irlbound/kernels.hpp"
#include "linear_system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace irlbound {

namespace {

constexpr double kStochasticTol = 1e-12;

void check_distribution(const Eigen::Ref<const Eigen::VectorXd>& p,
                        const std::string& what) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      throw InvalidInput(what + ": negative or non-finite probability");
    }
  }
  if (std::abs(p.sum() - 1.0) > kStochasticTol) {
    throw InvalidInput(what + ": probabilities do not sum to 1");
  }
}

}  // namespace

TabularMdp::TabularMdp(std::size_t n_states, std::size_t n_actions,
                       double gamma, std::vector<Row> rows,
                       Eigen::VectorXd initial_dist, Eigen::MatrixXd features)
    : n_states_(n_states),
      n_actions_(n_actions),
      gamma_(gamma),
      rows_(std::move(rows)),
      initial_dist_(std::move(initial_dist)),
      features_(std::move(features)) {
  if (n_states_ == 0 || n_actions_ == 0) {
    throw InvalidInput("mdp: n_states and n_actions must be positive");
  }
  if (!(gamma_ >= 0.0 && gamma_ < 1.0)) {
    throw InvalidInput("mdp: gamma must lie in [0, 1)");
  }
  if (rows_.size() != n_states_ * n_actions_) {
    throw InvalidInput("mdp: expected one transition row per (s, a)");
  }
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    double total = 0.0;
    for (const auto& t : rows_[i]) {
      if (t.next >= n_states_) {
        throw InvalidInput("mdp: next-state index out of range");
      }
      if (!std::isfinite(t.prob) || t.prob < 0.0) {
        throw InvalidInput("mdp: negative or non-finite transition");
      }
      total += t.prob;
    }
    if (std::abs(total - 1.0) > kStochasticTol) {
      throw InvalidInput("mdp: transition row " + std::to_string(i / n_actions_) +
                         "," + std::to_string(i % n_actions_) +
                         " does not sum to 1");
    }
  }
  if (static_cast<std::size_t>(initial_dist_.size()) != n_states_) {
    throw InvalidInput("mdp: initial_dist has wrong length");
  }
  check_distribution(initial_dist_, "mdp initial_dist");
  if (static_cast<std::size_t>(features_.rows()) != n_states_ ||
      features_.cols() == 0) {
    throw InvalidInput("mdp: features must have one nonempty row per state");
  }
  for (Eigen::Index i = 0; i < features_.size(); ++i) {
    const double f = features_.data()[i];
    if (!(f >= 0.0 && f <= 1.0)) {
      throw InvalidInput("mdp: feature values must lie in [0, 1]");
    }
  }
}

TabularMdp TabularMdp::from_dense(
    double gamma,
    const std::vector<std::vector<std::vector<double>>>& transitions,
    Eigen::VectorXd initial_dist, Eigen::MatrixXd features) {
  const std::size_t n_states = transitions.size();
  if (n_states == 0) throw InvalidInput("mdp: empty transition tensor");
  const std::size_t n_actions = transitions.front().size();
  std::vector<Row> rows;
  rows.reserve(n_states * n_actions);
  for (const auto& per_state : transitions) {
    if (per_state.size() != n_actions) {
      throw InvalidInput("mdp: ragged transition tensor");
    }
    for (const auto& dist : per_state) {
      if (dist.size() != n_states) {
        throw InvalidInput("mdp: transition row has wrong length");
      }
      Row row;
      for (std::size_t s2 = 0; s2 < n_states; ++s2) {
        if (dist[s2] != 0.0) row.push_back({s2, dist[s2]});
      }
      rows.push_back(std::move(row));
    }
  }
  return TabularMdp(n_states, n_actions, gamma, std::move(rows),
                    std::move(initial_dist), std::move(features));
}

double TabularMdp::transition(std::size_t s, std::size_t a,
                              std::size_t next) const {
  double p = 0.0;
  for (const auto& t : row(s, a)) {
    if (t.next == next) p += t.prob;
  }
  return p;
}

std::vector<std::size_t> TabularMdp::initial_support() const {
  std::vector<std::size_t> support;
  for (std::size_t s = 0; s < n_states_; ++s) {
    if (initial_dist_[static_cast<Eigen::Index>(s)] > 0.0) support.push_back(s);
  }
  return support;
}

std::size_t TabularMdp::sample_next(std::size_t s, std::size_t a,
                                    Rng& rng) const {
  const Row& r = row(s, a);
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (const auto& t : r) {
    if (u < t.prob) return t.next;
    u -= t.prob;
  }
  // Rounding left a sliver of mass past the last entry.
  for (auto it = r.rbegin(); it != r.rend(); ++it) {
    if (it->prob > 0.0) return it->next;
  }
  return r.back().next;
}

std::size_t TabularMdp::sample_initial(Rng& rng) const {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  std::size_t last = 0;
  for (std::size_t s = 0; s < n_states_; ++s) {
    const double p = initial_dist_[static_cast<Eigen::Index>(s)];
    if (p <= 0.0) continue;
    if (u < p) return s;
    u -= p;
    last = s;
  }
  return last;
}

RewardWeights RewardWeights::normalized(Eigen::VectorXd w) {
  if (!w.allFinite()) throw InvalidInput("weights: non-finite entry");
  const double norm = w.lpNorm<1>();
  if (norm == 0.0) throw InvalidInput("weights: cannot normalize zero vector");
  w /= norm;
  return RewardWeights(std::move(w), Regime::kUnitSphere);
}

RewardWeights RewardWeights::unit(Eigen::VectorXd w) {
  if (!w.allFinite()) throw InvalidInput("weights: non-finite entry");
  if (std::abs(w.lpNorm<1>() - 1.0) > 1e-9) {
    throw InvalidInput("weights: L1 norm must equal 1");
  }
  return RewardWeights(std::move(w), Regime::kUnitSphere);
}

RewardWeights RewardWeights::unnormalized(Eigen::VectorXd w) {
  return RewardWeights(std::move(w), Regime::kUnitBall);
}

bool RewardWeights::on_unit_sphere() const {
  return std::abs(w_.lpNorm<1>() - 1.0) <= 1e-9;
}

Policy Policy::deterministic(std::vector<std::size_t> actions) {
  Policy p;
  p.kind_ = Kind::kDeterministic;
  p.actions_ = std::move(actions);
  return p;
}

Policy Policy::stochastic(Eigen::MatrixXd probs) {
  for (Eigen::Index s = 0; s < probs.rows(); ++s) {
    check_distribution(probs.row(s).transpose(), "policy row");
  }
  Policy p;
  p.kind_ = Kind::kStochastic;
  p.probs_ = std::move(probs);
  return p;
}

Policy Policy::uniform(std::size_t n_states, std::size_t n_actions) {
  return stochastic(Eigen::MatrixXd::Constant(
      static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_actions),
      1.0 / static_cast<double>(n_actions)));
}

std::size_t Policy::n_states() const {
  return is_deterministic() ? actions_.size()
                            : static_cast<std::size_t>(probs_.rows());
}

double Policy::prob(std::size_t s, std::size_t a) const {
  if (is_deterministic()) return actions_[s] == a ? 1.0 : 0.0;
  return probs_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
}

void Policy::validate_for(const TabularMdp& mdp) const {
  if (n_states() != mdp.n_states()) {
    throw InvalidInput("policy: state count does not match mdp");
  }
  if (is_deterministic()) {
    for (auto a : actions_) {
      if (a >= mdp.n_actions()) throw InvalidInput("policy: action out of range");
    }
  } else if (static_cast<std::size_t>(probs_.cols()) != mdp.n_actions()) {
    throw InvalidInput("policy: action count does not match mdp");
  }
}

bool Policy::operator==(const Policy& other) const {
  if (kind_ != other.kind_) return false;
  if (is_deterministic()) return actions_ == other.actions_;
  return probs_ == other.probs_;
}

Eigen::VectorXd state_rewards(const TabularMdp& mdp, const RewardWeights& w) {
  if (w.size() != mdp.n_features()) {
    throw InvalidInput("weights: dimension does not match feature count");
  }
  if (!w.values().allFinite()) throw InvalidInput("weights: non-finite entry");
  return mdp.features() * w.values();
}

Eigen::MatrixXd q_from_values(const TabularMdp& mdp,
                              const Eigen::VectorXd& rewards,
                              const Eigen::VectorXd& v) {
  Eigen::MatrixXd q;
  kernels::q_values(mdp, rewards, v, q);
  return q;
}

ValueFunction value_iteration(const TabularMdp& mdp, const RewardWeights& w,
                              double tol) {
  if (!(tol > 0.0)) throw InvalidInput("value_iteration: tol must be positive");
  const Eigen::VectorXd r = state_rewards(mdp, w);
  const double gamma = mdp.gamma();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(r.size());
  Eigen::VectorXd next(r.size());
  // ||v_{k+1} - B v_{k+1}|| <= gamma ||v_{k+1} - v_k||.
  for (std::size_t it = 0;; ++it) {
    const double delta = kernels::bellman_optimal_backup(mdp, r, v, next);
    v.swap(next);
    if (gamma * delta <= tol) break;
    if (it > 100'000'000) throw std::runtime_error("value_iteration diverged");
  }
  ValueFunction vf;
  vf.q = q_from_values(mdp, r, v);
  vf.v = vf.q.rowwise().maxCoeff();
  return vf;
}

std::vector<std::size_t> greedy_actions(const Eigen::MatrixXd& q) {
  std::vector<std::size_t> actions(static_cast<std::size_t>(q.rows()));
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    Eigen::Index best = 0;
    for (Eigen::Index a = 1; a < q.cols(); ++a) {
      if (q(s, a) > q(s, best)) best = a;
    }
    actions[static_cast<std::size_t>(s)] = static_cast<std::size_t>(best);
  }
  return actions;
}

Policy optimal_policy(const ValueFunction& vf) {
  return Policy::deterministic(greedy_actions(vf.q));
}

ValueFunction policy_iteration(const TabularMdp& mdp, const RewardWeights& w,
                               double tol, const Policy* initial) {
  if (!(tol > 0.0)) throw InvalidInput("policy_iteration: tol must be positive");
  const Eigen::VectorXd r = state_rewards(mdp, w);
  std::vector<std::size_t> actions;
  if (initial != nullptr) {
    initial->validate_for(mdp);
    if (!initial->is_deterministic()) {
      throw InvalidInput("policy_iteration: initial policy must be deterministic");
    }
    actions = initial->actions();
  } else {
    actions = greedy_actions(q_from_values(mdp, r, r));
  }
  const double improve_eps = 1e-12 * std::max(1.0, r.cwiseAbs().maxCoeff());
  ValueFunction vf;
  for (std::size_t sweep = 0;; ++sweep) {
    const Policy pi = Policy::deterministic(actions);
    const detail::PolicySystem system(mdp, pi, detail::PolicySystem::Side::kValue);
    vf.v = system.solve(r);
    vf.q = q_from_values(mdp, r, vf.v);
    bool changed = false;
    for (std::size_t s = 0; s < actions.size(); ++s) {
      const auto row = static_cast<Eigen::Index>(s);
      Eigen::Index best = 0;
      vf.q.row(row).maxCoeff(&best);
      const auto cur = static_cast<Eigen::Index>(actions[s]);
      if (vf.q(row, best) > vf.q(row, cur) + improve_eps / (1.0 - mdp.gamma())) {
        // Lowest index among the maximizers.
        for (Eigen::Index a = 0; a < vf.q.cols(); ++a) {
          if (vf.q(row, a) == vf.q(row, best)) {
            best = a;
            break;
          }
        }
        actions[s] = static_cast<std::size_t>(best);
        changed = true;
      }
    }
    if (!changed) break;
    if (sweep > 10'000) throw std::runtime_error("policy_iteration did not settle");
  }
  vf.v = vf.q.rowwise().maxCoeff();
  return vf;
}

ValueFunction policy_evaluation(const TabularMdp& mdp, const RewardWeights& w,
                                const Policy& pi, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("policy_evaluation: tol must be positive");
  pi.validate_for(mdp);
  const Eigen::VectorXd r = state_rewards(mdp, w);
  const detail::PolicySystem system(mdp, pi, detail::PolicySystem::Side::kValue);
  ValueFunction vf;
  vf.v = system.solve(r);
  vf.q = q_from_values(mdp, r, vf.v);
  return vf;
}

double policy_value(const TabularMdp& mdp, const RewardWeights& w,
                    const Policy& pi) {
  const ValueFunction vf = policy_evaluation(mdp, w, pi);
  return mdp.initial_dist().dot(vf.v);
}

Eigen::VectorXd state_occupancy(const TabularMdp& mdp, const Policy& pi) {
  pi.validate_for(mdp);
  const detail::PolicySystem system(mdp, pi,
                                    detail::PolicySystem::Side::kOccupancy);
  return system.solve(mdp.initial_dist());
}

Eigen::VectorXd expected_feature_counts(const TabularMdp& mdp,
                                        const Policy& pi, double tol) {
  if (!(tol > 0.0)) throw InvalidInput("feature counts: tol must be positive");
  return mdp.features().transpose() * state_occupancy(mdp, pi);
}

Eigen::MatrixXd state_feature_counts(const TabularMdp& mdp, const Policy& pi) {
  pi.validate_for(mdp);
  const detail::PolicySystem system(mdp, pi, detail::PolicySystem::Side::kValue);
  return system.solve(mdp.features());
}

WarmStartSolver::WarmStartSolver(const TabularMdp& mdp,
                                 std::size_t max_repair_sweeps, double tol)
    : mdp_(mdp),
      max_sweeps_(max_repair_sweeps),
      tol_(tol),
      max_rank_(std::clamp<std::size_t>(mdp.n_states() / 8, 8, 64)) {}

WarmStartSolver::~WarmStartSolver() = default;

void WarmStartSolver::rebase(const std::vector<std::size_t>& actions) {
  base_actions_ = actions;
  base_system_ = std::make_unique<detail::PolicySystem>(
      mdp_, Policy::deterministic(actions), detail::PolicySystem::Side::kValue);
  base_counts_ = base_system_->solve(mdp_.features());
  base_columns_.assign(mdp_.n_states(), Eigen::VectorXd());
  ++factorizations_;
}

const Eigen::VectorXd& WarmStartSolver::base_inverse_column(std::size_t s) {
  Eigen::VectorXd& col = base_columns_[s];
  if (col.size() == 0) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(
        static_cast<Eigen::Index>(mdp_.n_states()), 1);
    e(static_cast<Eigen::Index>(s), 0) = 1.0;
    col = base_system_->solve(e).col(0);
  }
  return col;
}

void WarmStartSolver::adopt(std::vector<std::size_t> actions) {
  ++policy_solves_;
  if (auto hit = cache_index_.find(actions); hit != cache_index_.end()) {
    cache_.splice(cache_.begin(), cache_, hit->second);
    feature_counts_ = hit->second->second;
    policy_ = Policy::deterministic(std::move(actions));
    return;
  }
  compute_counts(actions);
  if (cache_.size() == kCacheSize) {
    cache_index_.erase(cache_.back().first);
    cache_.pop_back();
  }
  cache_.emplace_front(actions, feature_counts_);
  cache_index_[actions] = cache_.begin();
  policy_ = Policy::deterministic(std::move(actions));
}

void WarmStartSolver::compute_counts(const std::vector<std::size_t>& actions) {
  std::vector<std::size_t> changed;
  if (base_system_) {
    for (std::size_t s = 0; s < actions.size(); ++s) {
      if (actions[s] != base_actions_[s]) changed.push_back(s);
    }
  }
  if (!base_system_ || changed.size() > max_rank_) {
    rebase(actions);
    changed.clear();
  }
  if (changed.empty()) {
    feature_counts_ = base_counts_;
    return;
  }
  // A_pi = A_base + U V^T with U = [e_s] and row s of V^T equal to
  // -gamma (P_pi(s, .) - P_base(s, .)).
  const auto r = static_cast<Eigen::Index>(changed.size());
  const auto n = static_cast<Eigen::Index>(mdp_.n_states());
  const double gamma = mdp_.gamma();
  Eigen::MatrixXd z(n, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    z.col(i) = base_inverse_column(changed[static_cast<std::size_t>(i)]);
  }
  Eigen::MatrixXd capacitance = Eigen::MatrixXd::Identity(r, r);
  Eigen::MatrixXd vt_counts = Eigen::MatrixXd::Zero(r, base_counts_.cols());
  for (Eigen::Index i = 0; i < r; ++i) {
    const std::size_t s = changed[static_cast<std::size_t>(i)];
    const auto apply = [&](const TabularMdp::Row& row, double sign) {
      for (const auto& t : row) {
        const auto j = static_cast<Eigen::Index>(t.next);
        const double coef = -gamma * sign * t.prob;
        capacitance.row(i) += coef * z.row(j);
        vt_counts.row(i) += coef * base_counts_.row(j);
      }
    };
    apply(mdp_.row(s, actions[s]), 1.0);
    apply(mdp_.row(s, base_actions_[s]), -1.0);
  }
  feature_counts_ = base_counts_ - z * capacitance.partialPivLu().solve(vt_counts);
}

const Eigen::MatrixXd& WarmStartSolver::solve(const RewardWeights& w) {
  const Eigen::VectorXd r = state_rewards(mdp_, w);
  if (policy_.n_states() == 0) {
    adopt(greedy_actions(q_from_values(mdp_, r, r)));
  }
  const double improve_eps =
      1e-12 * std::max(1.0, r.cwiseAbs().maxCoeff()) / (1.0 - mdp_.gamma());
  for (std::size_t sweep = 0; sweep <= max_sweeps_; ++sweep) {
    const Eigen::VectorXd v = feature_counts_ * w.values();
    kernels::q_values(mdp_, r, v, q_);
    std::vector<std::size_t> actions = policy_.actions();
    bool changed = false;
    for (std::size_t s = 0; s < actions.size(); ++s) {
      const auto row = static_cast<Eigen::Index>(s);
      const double best = q_.row(row).maxCoeff();
      if (best > q_(row, static_cast<Eigen::Index>(actions[s])) + improve_eps) {
        Eigen::Index a = 0;
        while (q_(row, a) != best) ++a;
        actions[s] = static_cast<std::size_t>(a);
        changed = true;
      }
    }
    if (!changed) return q_;
    if (sweep == max_sweeps_) break;
    adopt(std::move(actions));
  }
  ++fallbacks_;
  const ValueFunction cold = value_iteration(mdp_, w, tol_);
  adopt(greedy_actions(cold.q));
  kernels::q_values(mdp_, r, feature_counts_ * w.values(), q_);
  return q_;
}

QLearningConfig default_q_learning_config(std::size_t episodes,
                                          std::uint64_t seed) {
  QLearningConfig cfg;
  cfg.episodes = episodes;
  cfg.seed = seed;
  cfg.learning_rate = [](std::size_t) { return 0.1; };
  cfg.epsilon = [episodes](std::size_t e) {
    if (episodes <= 1) return 0.05;
    const double frac =
        static_cast<double>(e) / static_cast<double>(episodes - 1);
    return 1.0 + (0.05 - 1.0) * frac;
  };
  return cfg;
}

ValueFunction q_learning(const GenerativeModel& env, const RewardWeights& w,
                         const QLearningConfig& cfg) {
  const std::size_t n_states = env.n_states();
  const std::size_t n_actions = env.n_actions();
  const QLearningConfig defaults = default_q_learning_config(cfg.episodes, cfg.seed);
  const auto& lr = cfg.learning_rate ? cfg.learning_rate : defaults.learning_rate;
  const auto& eps = cfg.epsilon ? cfg.epsilon : defaults.epsilon;

  Eigen::VectorXd rewards(static_cast<Eigen::Index>(n_states));
  for (std::size_t s = 0; s < n_states; ++s) {
    const Eigen::VectorXd phi = env.reward_features(s);
    if (static_cast<std::size_t>(phi.size()) != w.size()) {
      throw InvalidInput("q_learning: weight dimension mismatch");
    }
    rewards[static_cast<Eigen::Index>(s)] = phi.dot(w.values());
  }

  Rng rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any_state(0, n_states - 1);
  std::uniform_int_distribution<std::size_t> any_action(0, n_actions - 1);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_states),
                                            static_cast<Eigen::Index>(n_actions));
  const double gamma = env.gamma();
  for (std::size_t e = 0; e < cfg.episodes; ++e) {
    const double alpha = lr(e);
    const double epsilon = eps(e);
    std::size_t s = cfg.exploring_starts ? any_state(rng) : env.sample_initial(rng);
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
      const auto row = static_cast<Eigen::Index>(s);
      std::size_t a;
      if (unit(rng) < epsilon) {
        a = any_action(rng);
      } else {
        Eigen::Index best = 0;
        for (Eigen::Index b = 1; b < q.cols(); ++b) {
          if (q(row, b) > q(row, best)) best = b;
        }
        a = static_cast<std::size_t>(best);
      }
      const std::size_t next = env.sample_next(s, a, rng);
      const double target =
          rewards[row] + gamma * q.row(static_cast<Eigen::Index>(next)).maxCoeff();
      double& entry = q(row, static_cast<Eigen::Index>(a));
      entry += alpha * (target - entry);
      s = next;
    }
  }
  ValueFunction vf;
  vf.q = std::move(q);
  vf.v = vf.q.rowwise().maxCoeff();
  return vf;
}

}  // namespace irlbound
