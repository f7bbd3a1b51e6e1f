#pragma once

// Greedy single-state hill climbing on the VaR bound of a policy's loss.

#include "irlbound/birl.hpp"
#include "irlbound/risk_bounds.hpp"

#include <vector>

namespace irlbound {

struct HillClimbResult {
  Policy policy;
  /// Bound of the initial policy followed by one entry per accepted change.
  std::vector<BoundReport> trajectory;
  /// False when the iteration cap stopped the climb early.
  bool converged = true;
};

inline constexpr double kStrictDecrease = 1e-12;

/// Each iteration evaluates every one-state action change and applies the one
/// with the largest decrease in the bound (ties: lowest state, then lowest
/// action). Stops when no change lowers the bound by more than
/// kStrictDecrease or after `max_iters` accepted changes.
HillClimbResult var_hill_climb(const TabularMdp& mdp, const PosteriorChain& chain,
                               const Policy& pi_init, double alpha, double delta,
                               double tol = kDefaultSolverTol,
                               std::size_t max_iters = 1000);

}  // namespace irlbound
