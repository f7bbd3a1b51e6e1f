#include "linear_system.hpp"

#include <stdexcept>
#include <vector>

namespace irlbound::detail {

Eigen::SparseMatrix<double> policy_transition_matrix(const TabularMdp& mdp,
                                                     const Policy& pi) {
  std::vector<Eigen::Triplet<double>> triplets;
  const std::size_t n = mdp.n_states();
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      const double pa = pi.prob(s, a);
      if (pa == 0.0) continue;
      for (const auto& t : mdp.row(s, a)) {
        triplets.emplace_back(static_cast<int>(s), static_cast<int>(t.next),
                              pa * t.prob);
      }
    }
  }
  Eigen::SparseMatrix<double> p(static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(n));
  p.setFromTriplets(triplets.begin(), triplets.end());
  return p;
}

PolicySystem::PolicySystem(const TabularMdp& mdp, const Policy& pi, Side side) {
  const auto n = static_cast<Eigen::Index>(mdp.n_states());
  Eigen::SparseMatrix<double> a = -mdp.gamma() * policy_transition_matrix(mdp, pi);
  for (Eigen::Index i = 0; i < n; ++i) a.coeffRef(i, i) += 1.0;
  if (side == Side::kOccupancy) a = Eigen::SparseMatrix<double>(a.transpose());
  a.makeCompressed();
  if (n <= kDenseLimit) {
    dense_.compute(Eigen::MatrixXd(a));
  } else {
    sparse_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    sparse_->analyzePattern(a);
    sparse_->factorize(a);
    if (sparse_->info() != Eigen::Success) {
      throw std::runtime_error("policy system factorization failed");
    }
  }
}

Eigen::MatrixXd PolicySystem::solve(const Eigen::MatrixXd& rhs) const {
  if (sparse_) return sparse_->solve(rhs);
  return dense_.solve(rhs);
}

}  // namespace irlbound::detail
