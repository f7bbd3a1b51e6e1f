#pragma once

// Sampling on the L1 unit sphere {w : sum |w_i| = 1} and the pairwise
// manifold walk that keeps MCMC proposals on it.

#include "irlbound/mdp.hpp"

#include <utility>

namespace irlbound {

inline constexpr double kDefaultWalkStep = 0.01;

enum class Rotation { kClockwise, kCounterclockwise };

/// Inverse CDF of the Laplace density exp(-|x|)/2. Returns -inf at z = 0 and
/// +inf at z = 1; callers resample those endpoints.
double inverse_cdf_double_exponential(double z);

/// Uniform draw from the L1 unit sphere in R^d.
Eigen::VectorXd sample_l1_sphere(std::size_t d, Rng& rng);

/// Moves (w1, w2) a distance `step_size` in |w1| along the diamond
/// |w1| + |w2| = const, crossing sign quadrants at the corners. Throws
/// InvalidInput when both inputs are zero.
std::pair<double, double> l1_manifold_step(double w1, double w2,
                                           Rotation direction,
                                           double step_size);

struct WalkState {
  Eigen::VectorXd w;
  double step_size = kDefaultWalkStep;
};

/// One proposal: a manifold step on every pair (i, j), i < j, in
/// lexicographic order, each with an independent fair-coin direction.
Eigen::VectorXd l1_ball_walk(const WalkState& state, Rng& rng);

}  // namespace irlbound
