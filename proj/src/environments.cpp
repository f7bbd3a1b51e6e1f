#include "irlbound/environments.hpp"

#include "irlbound/l1_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace irlbound {

// Gridworld -------------------------------------------------------------

std::vector<Cell> GridworldSpec::default_start_cells(std::size_t width,
                                                     std::size_t height) {
  std::vector<Cell> cells;
  for (std::size_t i : {1u, 4u, 7u}) {
    for (std::size_t j : {1u, 4u, 7u}) {
      cells.push_back({i * height / 9, j * width / 9});
    }
  }
  return cells;
}

void GridworldSpec::validate() const {
  if (width == 0 || height == 0 || n_features == 0) {
    throw InvalidInput("gridworld: width, height and n_features must be positive");
  }
  if (!(slip >= 0.0 && slip <= 1.0)) throw InvalidInput("gridworld: slip must lie in [0, 1]");
  if (start_cells.empty()) throw InvalidInput("gridworld: no start cells");
  for (const auto& c : start_cells) {
    if (c.row >= height || c.col >= width) {
      throw InvalidInput("gridworld: start cell outside the grid");
    }
  }
}

namespace {

std::size_t move(const GridworldSpec& spec, std::size_t s, std::size_t action) {
  const std::size_t r = s / spec.width;
  const std::size_t c = s % spec.width;
  switch (action) {
    case kUp:
      return r == 0 ? s : s - spec.width;
    case kDown:
      return r + 1 == spec.height ? s : s + spec.width;
    case kLeft:
      return c == 0 ? s : s - 1;
    default:
      return c + 1 == spec.width ? s : s + 1;
  }
}

std::array<std::size_t, 2> perpendicular(std::size_t action) {
  if (action == kUp || action == kDown) return {kLeft, kRight};
  return {kUp, kDown};
}

void add_mass(TabularMdp::Row& row, std::size_t next, double p) {
  if (p == 0.0) return;
  for (auto& t : row) {
    if (t.next == next) {
      t.prob += p;
      return;
    }
  }
  row.push_back({next, p});
}

}  // namespace

TabularMdp gridworld_mdp(const GridworldSpec& spec, Eigen::MatrixXd features,
                         const std::vector<std::size_t>& terminals) {
  spec.validate();
  const std::size_t n = spec.width * spec.height;
  std::vector<bool> is_terminal(n, false);
  for (auto t : terminals) {
    if (t >= n) throw InvalidInput("gridworld: terminal state out of range");
    is_terminal[t] = true;
    features.row(static_cast<Eigen::Index>(t)).setZero();
  }
  std::vector<TabularMdp::Row> rows;
  rows.reserve(n * 4);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t a = 0; a < 4; ++a) {
      TabularMdp::Row row;
      if (is_terminal[s]) {
        row.push_back({s, 1.0});
      } else {
        add_mass(row, move(spec, s, a), 1.0 - spec.slip);
        for (auto side : perpendicular(a)) {
          add_mass(row, move(spec, s, side), spec.slip / 2.0);
        }
      }
      rows.push_back(std::move(row));
    }
  }
  Eigen::VectorXd d0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& c : spec.start_cells) {
    d0[static_cast<Eigen::Index>(cell_index(spec, c))] += 1.0;
  }
  d0 /= d0.sum();
  return TabularMdp(n, 4, spec.gamma, std::move(rows), std::move(d0),
                    std::move(features));
}

namespace {

Eigen::MatrixXd random_one_hot_features(const GridworldSpec& spec, Rng& rng) {
  const std::size_t n = spec.width * spec.height;
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(spec.n_features));
  std::uniform_int_distribution<std::size_t> pick(0, spec.n_features - 1);
  for (std::size_t s = 0; s < n; ++s) {
    f(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(pick(rng))) = 1.0;
  }
  return f;
}

}  // namespace

std::pair<TabularMdp, RewardWeights> random_gridworld(const GridworldSpec& spec,
                                                      Rng& rng) {
  spec.validate();
  Eigen::MatrixXd features = random_one_hot_features(spec, rng);
  RewardWeights w = RewardWeights::unit(sample_l1_sphere(spec.n_features, rng));
  return {gridworld_mdp(spec, std::move(features)), std::move(w)};
}

std::pair<TabularMdp, RewardWeights> terminalized_gridworld(
    const GridworldSpec& spec, std::size_t terminal_state, Rng& rng) {
  spec.validate();
  if (terminal_state >= spec.width * spec.height) {
    throw InvalidInput("terminalized_gridworld: terminal state out of range");
  }
  Eigen::MatrixXd features = random_one_hot_features(spec, rng);
  RewardWeights w = RewardWeights::unit(sample_l1_sphere(spec.n_features, rng));
  return {gridworld_mdp(spec, std::move(features), {terminal_state}),
          std::move(w)};
}

TerrainTask terrain_task() {
  // A: demonstration start, B: transfer start, T: terminal, R: red terrain.
  const std::vector<std::string> layout = {
      "...A...",
      "...R...",
      "...R...",
      "...T...",
      "...R...",
      "...B...",
      ".......",
  };
  GridworldSpec spec;
  spec.height = layout.size();
  spec.width = layout.front().size();
  spec.n_features = 2;
  spec.slip = 0.0;
  spec.gamma = 0.9;
  spec.start_cells.clear();

  const std::size_t n = spec.width * spec.height;
  Eigen::MatrixXd features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
  std::size_t terminal = 0, demo_start = 0, transfer_start = 0;
  for (std::size_t r = 0; r < spec.height; ++r) {
    for (std::size_t c = 0; c < spec.width; ++c) {
      const std::size_t s = r * spec.width + c;
      const char ch = layout[r][c];
      features(static_cast<Eigen::Index>(s), ch == 'R' ? 1 : 0) = 1.0;
      if (ch == 'T') terminal = s;
      if (ch == 'A') demo_start = s;
      if (ch == 'B') transfer_start = s;
    }
  }
  spec.start_cells = {{demo_start / spec.width, demo_start % spec.width},
                      {transfer_start / spec.width, transfer_start % spec.width}};
  TabularMdp mdp = gridworld_mdp(spec, std::move(features), {terminal});
  // Red costs three times as much as white.
  RewardWeights demo_reward = RewardWeights::unit(Eigen::Vector2d(-0.25, -0.75));
  return TerrainTask{spec,       std::move(mdp), terminal, demo_start,
                     transfer_start, std::move(demo_reward), layout};
}

Trajectory rollout_to_terminal(const TabularMdp& mdp, const Policy& pi,
                               std::size_t start, std::size_t terminal,
                               std::size_t max_steps, Rng& rng) {
  Trajectory traj;
  std::size_t s = start;
  for (std::size_t t = 0; t < max_steps && s != terminal; ++t) {
    const std::size_t a = pi.action(s);
    traj.emplace_back(s, a);
    s = mdp.sample_next(s, a, rng);
  }
  return traj;
}

DemonstrationSet generate_demos(const TabularMdp& mdp,
                                const RewardWeights& w_true,
                                const DemoConfig& cfg, Rng& rng) {
  if (cfg.horizon == 0) throw InvalidInput("generate_demos: horizon must be >= 1");
  if (!(cfg.noise >= 0.0 && cfg.noise <= 1.0)) {
    throw InvalidInput("generate_demos: noise must lie in [0, 1]");
  }
  const Policy pi = optimal_policy(policy_iteration(mdp, w_true));
  const std::vector<std::size_t> starts = mdp.initial_support();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any_action(0, mdp.n_actions() - 1);
  std::vector<Trajectory> trajectories;
  trajectories.reserve(cfg.n_demos);
  for (std::size_t d = 0; d < cfg.n_demos; ++d) {
    std::size_t s = starts[d % starts.size()];
    Trajectory traj;
    traj.reserve(cfg.horizon);
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
      const bool random = unit(rng) < cfg.noise;
      const std::size_t a = random ? any_action(rng) : pi.action(s);
      traj.emplace_back(s, a);
      s = mdp.sample_next(s, a, rng);
    }
    trajectories.push_back(std::move(traj));
  }
  return DemonstrationSet(std::move(trajectories));
}

// Driving ---------------------------------------------------------------

namespace {

constexpr unsigned kPatterns = 7;  // road masks 0..6; 7 (all blocked) excluded

std::size_t pow_size(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

bool occupied(unsigned mask, std::size_t lane) {
  return lane >= 1 && lane <= kRoadLanes && ((mask >> (lane - 1)) & 1u) != 0;
}

std::size_t steer(std::size_t lane, std::size_t action, std::size_t n_lanes) {
  if (action == kSteerLeft) return lane == 0 ? 0 : lane - 1;
  if (action == kSteerRight) return lane + 1 == n_lanes ? lane : lane + 1;
  return lane;
}

bool on_road(std::size_t lane) { return lane >= 1 && lane <= kRoadLanes; }

}  // namespace

void DrivingSpec::validate() const {
  if (n_lanes != 5) throw InvalidInput("driving: exactly 5 lanes are modeled");
  if (window_rows == 0) throw InvalidInput("driving: window_rows must be >= 1");
  if (!(spawn_prob >= 0.0 && spawn_prob < 1.0)) {
    throw InvalidInput("driving: spawn_prob must lie in [0, 1)");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("driving: gamma must lie in [0, 1)");
}

std::size_t driving_state_count_unpruned(const DrivingSpec& spec) {
  return spec.n_lanes * pow_size(8, spec.window_rows);
}

std::size_t driving_state_count(const DrivingSpec& spec) {
  return spec.n_lanes * pow_size(kPatterns, spec.window_rows);
}

std::size_t encode_driving_state(const DrivingSpec& spec, const DrivingState& s) {
  std::size_t index = 0;
  for (std::size_t r = spec.window_rows; r-- > 0;) {
    index = index * kPatterns + s.rows[r];
  }
  return s.lane * pow_size(kPatterns, spec.window_rows) + index;
}

DrivingState decode_driving_state(const DrivingSpec& spec, std::size_t index) {
  const std::size_t per_lane = pow_size(kPatterns, spec.window_rows);
  DrivingState s{index / per_lane, std::vector<unsigned>(spec.window_rows)};
  std::size_t rest = index % per_lane;
  for (std::size_t r = 0; r < spec.window_rows; ++r) {
    s.rows[r] = static_cast<unsigned>(rest % kPatterns);
    rest /= kPatterns;
  }
  return s;
}

TabularMdp driving_mdp(const DrivingSpec& spec) {
  spec.validate();
  const std::size_t n = driving_state_count(spec);
  if (n > spec.max_states) {
    throw InvalidInput("driving: " + std::to_string(n) +
                       " states exceed max_states; use fewer window_rows");
  }
  // Fresh top-row pattern distribution, conditioned on a free lane.
  std::array<double, kPatterns> spawn{};
  const double p = spec.spawn_prob;
  const double norm = 1.0 - p * p * p;
  for (unsigned m = 0; m < kPatterns; ++m) {
    const int cars = std::popcount(m);
    spawn[m] = std::pow(p, cars) * std::pow(1.0 - p, 3 - cars) / norm;
  }

  std::vector<TabularMdp::Row> rows;
  rows.reserve(n * 3);
  Eigen::MatrixXd features =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), kDrivingRewardFeatures);
  for (std::size_t s = 0; s < n; ++s) {
    const DrivingState cur = decode_driving_state(spec, s);
    features(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(cur.lane)) = 1.0;
    if (occupied(cur.rows[0], cur.lane)) {
      features(static_cast<Eigen::Index>(s), kCollisionFeature) = 1.0;
    }
    for (std::size_t a = 0; a < 3; ++a) {
      DrivingState next{steer(cur.lane, a, spec.n_lanes), cur.rows};
      for (std::size_t r = 0; r + 1 < spec.window_rows; ++r) {
        next.rows[r] = cur.rows[r + 1];
      }
      TabularMdp::Row row;
      for (unsigned m = 0; m < kPatterns; ++m) {
        if (spawn[m] == 0.0) continue;
        next.rows[spec.window_rows - 1] = m;
        row.push_back({encode_driving_state(spec, next), spawn[m]});
      }
      rows.push_back(std::move(row));
    }
  }
  Eigen::VectorXd d0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t lane = 1; lane <= kRoadLanes; ++lane) {
    DrivingState start{lane, std::vector<unsigned>(spec.window_rows, 0)};
    d0[static_cast<Eigen::Index>(encode_driving_state(spec, start))] =
        1.0 / kRoadLanes;
  }
  return TabularMdp(n, 3, spec.gamma, std::move(rows), std::move(d0),
                    std::move(features));
}

Eigen::VectorXd driving_state_features(const DrivingSpec& spec,
                                       std::size_t state) {
  const DrivingState s = decode_driving_state(spec, state);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(12);
  f[static_cast<Eigen::Index>(s.lane)] = 1.0;
  const auto row_at = [&](std::size_t r) -> unsigned {
    return r < spec.window_rows ? s.rows[r] : 0u;
  };
  f[5] = occupied(row_at(0), s.lane) ? 1.0 : 0.0;
  f[6] = occupied(row_at(1), s.lane) ? 1.0 : 0.0;
  f[7] = occupied(row_at(2), s.lane) ? 1.0 : 0.0;
  if (s.lane > 0) {
    f[8] = occupied(row_at(0), s.lane - 1) ? 1.0 : 0.0;
    f[9] = occupied(row_at(1), s.lane - 1) ? 1.0 : 0.0;
  }
  f[10] = occupied(row_at(0), s.lane + 1) ? 1.0 : 0.0;
  f[11] = occupied(row_at(1), s.lane + 1) ? 1.0 : 0.0;
  return f;
}

std::vector<ScriptedPolicy> scripted_driving_policies(const DrivingSpec& spec,
                                                      const TabularMdp& mdp) {
  spec.validate();
  // Features: off-road left, lanes 1..3, off-road right, collision.
  const std::vector<std::pair<std::string, Eigen::VectorXd>> rewards = {
      {"right-safe",
       (Eigen::VectorXd(6) << -0.2, 0.0, 0.0, 0.1, -0.2, -0.5).finished()},
      {"on-road",
       (Eigen::VectorXd(6) << -0.5, 0.0, 0.0, 0.0, -0.5, 0.0).finished()},
      {"nasty",
       (Eigen::VectorXd(6) << -0.3, 0.0, 0.0, 0.0, -0.3, 0.4).finished()},
  };
  std::vector<ScriptedPolicy> out;
  for (const auto& [name, w] : rewards) {
    RewardWeights weights = RewardWeights::normalized(w);
    Policy pi = optimal_policy(policy_iteration(mdp, weights));
    out.push_back({name, std::move(weights), std::move(pi)});
  }
  return out;
}

Trajectory safe_driving_demo(const DrivingSpec& spec, const TabularMdp& mdp,
                             std::size_t horizon, Rng& rng) {
  Trajectory traj;
  std::size_t s = mdp.sample_initial(rng);
  for (std::size_t t = 0; t < horizon; ++t) {
    const DrivingState cur = decode_driving_state(spec, s);
    std::vector<std::size_t> safe, road;
    for (std::size_t a = 0; a < 3; ++a) {
      const std::size_t lane = steer(cur.lane, a, spec.n_lanes);
      if (!on_road(lane)) continue;
      road.push_back(a);
      // Row 1 slides level with the agent on the next step.
      if (spec.window_rows < 2 || !occupied(cur.rows[1], lane)) safe.push_back(a);
    }
    const auto& options = safe.empty() ? road : safe;
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    const std::size_t a = options[pick(rng)];
    traj.emplace_back(s, a);
    s = mdp.sample_next(s, a, rng);
  }
  return traj;
}

}  // namespace irlbound
