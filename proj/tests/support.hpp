#pragma once

#include "irlbound/mdp.hpp"

#include <random>
#include <vector>

namespace testing {

using irlbound::Rng;
using irlbound::TabularMdp;

/// Dense random MDP with every transition entry positive.
inline TabularMdp random_mdp(std::size_t n, std::size_t m, std::size_t k,
                             double gamma, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<std::vector<double>>> t(
      n, std::vector<std::vector<double>>(m, std::vector<double>(n)));
  for (auto& per_action : t) {
    for (auto& row : per_action) {
      double sum = 0.0;
      for (auto& p : row) sum += (p = u(rng) + 1e-3);
      for (auto& p : row) p /= sum;
    }
  }
  Eigen::VectorXd d0(static_cast<Eigen::Index>(n));
  for (auto& x : d0) x = u(rng) + 1e-3;
  d0 /= d0.sum();
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (auto& x : phi.reshaped()) x = u(rng);
  return TabularMdp::from_dense(gamma, t, d0, phi);
}

/// s0 -> s1 under a0, s0 stays under a1, s1 absorbing.
/// phi(s0) = (0, 1), phi(s1) = (1, 0).
inline TabularMdp chain_mdp(double gamma) {
  std::vector<std::vector<std::vector<double>>> t = {
      {{0.0, 1.0}, {1.0, 0.0}},
      {{0.0, 1.0}, {0.0, 1.0}},
  };
  Eigen::MatrixXd phi(2, 2);
  phi << 0.0, 1.0, 1.0, 0.0;
  return TabularMdp::from_dense(gamma, t, Eigen::Vector2d(1.0, 0.0), phi);
}

inline irlbound::RewardWeights random_unit_weights(std::size_t k, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd w(static_cast<Eigen::Index>(k));
  for (auto& x : w) x = u(rng);
  return irlbound::RewardWeights::normalized(w);
}

inline irlbound::Policy random_deterministic(std::size_t n, std::size_t m, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  std::vector<std::size_t> a(n);
  for (auto& x : a) x = pick(rng);
  return irlbound::Policy::deterministic(a);
}

/// Plain dense fixed-policy evaluation by repeated backups.
inline Eigen::VectorXd iterate_policy_values(const TabularMdp& mdp,
                                             const Eigen::VectorXd& r,
                                             const irlbound::Policy& pi,
                                             std::size_t sweeps) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(r.size());
  for (std::size_t it = 0; it < sweeps; ++it) {
    Eigen::VectorXd next = r;
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
      for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
        const double pa = pi.prob(s, a);
        if (pa == 0.0) continue;
        for (std::size_t s2 = 0; s2 < mdp.n_states(); ++s2) {
          next[static_cast<Eigen::Index>(s)] +=
              mdp.gamma() * pa * mdp.transition(s, a, s2) * v[static_cast<Eigen::Index>(s2)];
        }
      }
    }
    v = next;
  }
  return v;
}

}  // namespace testing
