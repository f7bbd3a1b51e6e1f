#pragma once

// (I - gamma P_pi) factorization shared by exact policy evaluation and the
// occupancy solves. Small systems use dense LU, larger ones sparse LU.

#include "irlbound/mdp.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <memory>

namespace irlbound::detail {

class PolicySystem {
 public:
  enum class Side { kValue, kOccupancy };

  /// kValue factors (I - gamma P_pi); kOccupancy factors its transpose.
  PolicySystem(const TabularMdp& mdp, const Policy& pi, Side side);

  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

 private:
  static constexpr Eigen::Index kDenseLimit = 400;

  Eigen::PartialPivLU<Eigen::MatrixXd> dense_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> sparse_;
};

/// Transition matrix under pi (row s holds the next-state distribution).
Eigen::SparseMatrix<double> policy_transition_matrix(const TabularMdp& mdp,
                                                     const Policy& pi);

}  // namespace irlbound::detail
