#pragma once

// Benchmark domains: random slippery gridworlds, a terminal navigation task
// with white and red terrain, and a tabular lane-driving task with a window
// of oncoming traffic. Also demonstration generators for each.

#include "irlbound/birl.hpp"
#include "irlbound/mdp.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace irlbound {

enum GridAction : std::size_t { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

struct Cell {
  std::size_t row;
  std::size_t col;
};

struct GridworldSpec {
  std::size_t width = 9;
  std::size_t height = 9;
  std::size_t n_features = 8;
  /// Total probability of slipping to one of the two perpendicular moves.
  double slip = 0.3;
  double gamma = 0.9;
  /// Initial distribution is uniform over these cells.
  std::vector<Cell> start_cells = default_start_cells(9, 9);

  /// 3x3 lattice of cells at 1/9, 4/9 and 7/9 of each side.
  static std::vector<Cell> default_start_cells(std::size_t width,
                                               std::size_t height);
  void validate() const;
};

inline std::size_t cell_index(const GridworldSpec& spec, Cell c) {
  return c.row * spec.width + c.col;
}

/// Slippery gridworld over the given per-cell features. Moves into a wall
/// leave the agent in place. States listed in `terminals` are absorbing.
TabularMdp gridworld_mdp(const GridworldSpec& spec, Eigen::MatrixXd features,
                         const std::vector<std::size_t>& terminals = {});

/// Random one-hot features per cell and a ground-truth w drawn uniformly from
/// the L1 unit sphere.
std::pair<TabularMdp, RewardWeights> random_gridworld(const GridworldSpec& spec,
                                                      Rng& rng);

/// Like random_gridworld, with `terminal_state` absorbing and featureless.
std::pair<TabularMdp, RewardWeights> terminalized_gridworld(
    const GridworldSpec& spec, std::size_t terminal_state, Rng& rng);

/// Navigation task with a central terminal and two terrain features
/// (white = 0, red = 1). One demonstration start shows that red is worse
/// than white; a second start must generalize from it.
struct TerrainTask {
  GridworldSpec spec;
  TabularMdp mdp;
  std::size_t terminal;
  std::size_t demo_start;
  std::size_t transfer_start;
  /// Reward used to generate the demonstration.
  RewardWeights demo_reward;
  std::vector<std::string> layout;
};

TerrainTask terrain_task();

/// Rolls out pi from `start` until `terminal` or `max_steps`; the terminal
/// state itself is not recorded.
Trajectory rollout_to_terminal(const TabularMdp& mdp, const Policy& pi,
                               std::size_t start, std::size_t terminal,
                               std::size_t max_steps, Rng& rng);

struct DemoConfig {
  std::size_t n_demos = 1;
  std::size_t horizon = 100;
  /// Probability of a uniformly random action at each step.
  double noise = 0.0;
};

/// Starts cycle round-robin over the support of the initial distribution; at
/// each step the optimal action for w_true is taken with probability
/// 1 - noise.
DemonstrationSet generate_demos(const TabularMdp& mdp,
                                const RewardWeights& w_true,
                                const DemoConfig& cfg, Rng& rng);

// Driving ---------------------------------------------------------------

enum DrivingAction : std::size_t { kSteerLeft = 0, kSteerRight = 1, kStay = 2 };

/// Lanes 0 and 4 are off-road; lanes 1..3 are the road. Row 0 of the traffic
/// window is level with the agent; cars advance one row per step.
struct DrivingSpec {
  std::size_t n_lanes = 5;
  std::size_t window_rows = 3;
  double spawn_prob = 0.3;
  double gamma = 0.9;
  std::size_t max_states = 200000;

  void validate() const;
};

inline constexpr std::size_t kRoadLanes = 3;
/// Reward features: five lane indicators then the collision indicator.
inline constexpr std::size_t kDrivingRewardFeatures = 6;
inline constexpr std::size_t kCollisionFeature = 5;

struct DrivingState {
  std::size_t lane;
  /// Per-row bitmask over road lanes 1..3 (bit j = lane j + 1); at most two
  /// bits set.
  std::vector<unsigned> rows;
};

/// States before removing rows with all three road lanes blocked.
std::size_t driving_state_count_unpruned(const DrivingSpec& spec);
std::size_t driving_state_count(const DrivingSpec& spec);
std::size_t encode_driving_state(const DrivingSpec& spec, const DrivingState& s);
DrivingState decode_driving_state(const DrivingSpec& spec, std::size_t index);

/// Exact transition model; the top row of each step is a fresh traffic
/// pattern (each road lane occupied with spawn_prob, conditioned on at least
/// one free lane). Starts uniformly in a road lane with empty traffic.
TabularMdp driving_mdp(const DrivingSpec& spec);

/// 12 binary indicators: 5 lanes, in-collision, tailgating, trailing, then
/// (collision, tailgating) for the left and right neighbour lanes.
Eigen::VectorXd driving_state_features(const DrivingSpec& spec,
                                       std::size_t state);

struct ScriptedPolicy {
  std::string name;
  RewardWeights weights;
  Policy policy;
};

/// right-safe, on-road and nasty, in that order, each optimal for a fixed
/// hand-set reward.
std::vector<ScriptedPolicy> scripted_driving_policies(const DrivingSpec& spec,
                                                      const TabularMdp& mdp);

/// One collision-free-where-possible demonstration: at each step a uniformly
/// random action among those that stay on the road and avoid a car next step.
Trajectory safe_driving_demo(const DrivingSpec& spec, const TabularMdp& mdp,
                             std::size_t horizon, Rng& rng);

}  // namespace irlbound
