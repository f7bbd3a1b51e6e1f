#include "irlbound/l1_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>

namespace irlbound {

namespace {

enum class Quadrant { kPlusPlus, kPlusMinus, kMinusMinus, kMinusPlus };

// Quadrant cycles and the direction |w1| moves in each, per rotation.
constexpr std::array<Quadrant, 4> kClockwisePos = {
    Quadrant::kPlusPlus, Quadrant::kPlusMinus, Quadrant::kMinusMinus,
    Quadrant::kMinusPlus};
constexpr std::array<int, 4> kClockwiseDir = {+1, -1, +1, -1};
constexpr std::array<Quadrant, 4> kCounterclockwisePos = {
    Quadrant::kPlusPlus, Quadrant::kMinusPlus, Quadrant::kMinusMinus,
    Quadrant::kPlusMinus};
constexpr std::array<int, 4> kCounterclockwiseDir = {-1, +1, -1, +1};

Quadrant quadrant_of(double w1, double w2) {
  const bool pos1 = w1 >= 0.0;
  const bool pos2 = w2 >= 0.0;
  if (pos1 && pos2) return Quadrant::kPlusPlus;
  if (pos1) return Quadrant::kPlusMinus;
  if (pos2) return Quadrant::kMinusPlus;
  return Quadrant::kMinusMinus;
}

std::size_t index_of(const std::array<Quadrant, 4>& cycle, Quadrant q) {
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (cycle[i] == q) return i;
  }
  return 0;
}

}  // namespace

double inverse_cdf_double_exponential(double z) {
  if (z < 0.5) return std::log(2.0 * z);
  return -std::log(2.0 - 2.0 * z);
}

Eigen::VectorXd sample_l1_sphere(std::size_t d, Rng& rng) {
  if (d == 0) throw InvalidInput("sample_l1_sphere: dimension must be positive");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(d));
  for (;;) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double v;
      do {
        v = inverse_cdf_double_exponential(unit(rng));
      } while (!std::isfinite(v));
      x[i] = v;
    }
    const double norm = x.lpNorm<1>();
    if (norm > 0.0) return x / norm;
  }
}

std::pair<double, double> l1_manifold_step(double w1, double w2,
                                           Rotation direction,
                                           double step_size) {
  if (w1 == 0.0 && w2 == 0.0) {
    throw InvalidInput("l1_manifold_step: both coordinates are zero");
  }
  const bool clockwise = direction == Rotation::kClockwise;
  const auto& positions = clockwise ? kClockwisePos : kCounterclockwisePos;
  const auto& dirs = clockwise ? kClockwiseDir : kCounterclockwiseDir;

  const double slack = std::abs(w1) + std::abs(w2);
  std::size_t idx = index_of(positions, quadrant_of(w1, w2));
  double mag1 = std::min(std::abs(w1), slack);
  double remaining = step_size;
  while (remaining > 0.0) {
    const int dir = dirs[idx];
    double max_step = remaining;
    if (dir == 1 && mag1 + remaining > slack) {
      max_step = slack - mag1;
      idx = (idx + 1) % 4;
    } else if (dir == -1 && mag1 - remaining < 0.0) {
      max_step = mag1;
      idx = (idx + 1) % 4;
    }
    mag1 += dir * max_step;
    remaining -= max_step;
  }
  mag1 = std::clamp(mag1, 0.0, slack);
  double out1 = mag1;
  double out2 = slack - mag1;
  switch (positions[idx]) {
    case Quadrant::kMinusPlus:
      out1 = -out1;
      break;
    case Quadrant::kPlusMinus:
      out2 = -out2;
      break;
    case Quadrant::kMinusMinus:
      out1 = -out1;
      out2 = -out2;
      break;
    case Quadrant::kPlusPlus:
      break;
  }
  // No negative zeros: the sign rule treats 0 as nonnegative.
  return {out1 + 0.0, out2 + 0.0};
}

Eigen::VectorXd l1_ball_walk(const WalkState& state, Rng& rng) {
  Eigen::VectorXd w = state.w;
  std::bernoulli_distribution coin(0.5);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    for (Eigen::Index j = i + 1; j < w.size(); ++j) {
      const Rotation dir =
          coin(rng) ? Rotation::kClockwise : Rotation::kCounterclockwise;
      if (w[i] != 0.0 || w[j] != 0.0) {
        std::tie(w[i], w[j]) = l1_manifold_step(w[i], w[j], dir, state.step_size);
      }
    }
  }
  return w;
}

}  // namespace irlbound
