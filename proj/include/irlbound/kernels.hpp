#pragma once

// Data-parallel inner loops. Each kernel has a `_serial` reference that the
// tests compare against and an OpenMP variant used by the library. Without
// OpenMP the parallel variants run single-threaded with identical results.

#include "irlbound/mdp.hpp"

#include <span>
#include <vector>

namespace irlbound::kernels {

/// One optimal Bellman backup v_out(s) = max_a Q(s,a). Returns max |v_out - v|.
double bellman_optimal_backup_serial(const TabularMdp& mdp,
                                     const Eigen::VectorXd& rewards,
                                     const Eigen::VectorXd& v,
                                     Eigen::VectorXd& v_out);
double bellman_optimal_backup(const TabularMdp& mdp,
                              const Eigen::VectorXd& rewards,
                              const Eigen::VectorXd& v,
                              Eigen::VectorXd& v_out);

/// Q(s,a) for all pairs.
void q_values_serial(const TabularMdp& mdp, const Eigen::VectorXd& rewards,
                     const Eigen::VectorXd& v, Eigen::MatrixXd& q);
void q_values(const TabularMdp& mdp, const Eigen::VectorXd& rewards,
              const Eigen::VectorXd& v, Eigen::MatrixXd& q);

/// EVD of `pi_eval` under each reward sample. The serial reference solves
/// every sample by value iteration and evaluates pi_eval directly; the
/// parallel kernel uses exact policy iteration plus one shared feature-count
/// solve for pi_eval.
std::vector<double> evd_batch_serial(const TabularMdp& mdp,
                                     std::span<const RewardWeights> samples,
                                     const Policy& pi_eval, double tol);
std::vector<double> evd_batch(const TabularMdp& mdp,
                              std::span<const RewardWeights> samples,
                              const Policy& pi_eval, double tol);

/// Optimal start-state value V*_w for each sample.
std::vector<double> optimal_values(const TabularMdp& mdp,
                                   std::span<const RewardWeights> samples,
                                   double tol);

int max_threads();

}  // namespace irlbound::kernels
