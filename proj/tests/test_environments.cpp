#include "irlbound/environments.hpp"
#include "irlbound/risk_bounds.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <deque>
#include <set>

using namespace irlbound;

namespace {

void check_stochastic(const TabularMdp& mdp) {
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      double sum = 0.0;
      for (const auto& t : mdp.row(s, a)) {
        CHECK(t.prob >= 0.0);
        sum += t.prob;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
}

std::vector<std::size_t> reachable(const TabularMdp& mdp, const Policy& pi) {
  std::vector<bool> seen(mdp.n_states(), false);
  std::deque<std::size_t> queue;
  for (auto s : mdp.initial_support()) {
    seen[s] = true;
    queue.push_back(s);
  }
  std::vector<std::size_t> out;
  while (!queue.empty()) {
    const std::size_t s = queue.front();
    queue.pop_front();
    out.push_back(s);
    for (const auto& t : mdp.row(s, pi.action(s))) {
      if (t.prob > 0.0 && !seen[t.next]) {
        seen[t.next] = true;
        queue.push_back(t.next);
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("environments") {

TEST_CASE("random gridworld") {
  Rng rng(1);
  auto [mdp, w] = random_gridworld(GridworldSpec{}, rng);
  CHECK(mdp.n_states() == 81);
  CHECK(mdp.n_actions() == 4);
  CHECK(w.size() == 8);
  CHECK(std::abs(w.values().lpNorm<1>() - 1.0) <= 1e-9);
  check_stochastic(mdp);
  for (Eigen::Index s = 0; s < 81; ++s) {
    CHECK(mdp.features().row(s).sum() == 1.0);
    CHECK(mdp.features().row(s).maxCoeff() == 1.0);
  }
  const auto support = mdp.initial_support();
  CHECK(support == std::vector<std::size_t>{10, 13, 16, 37, 40, 43, 64, 67, 70});

  // Interior cell: 0.7 intended, 0.15 to each perpendicular.
  const std::size_t centre = 40;
  CHECK(mdp.transition(centre, kUp, 31) == doctest::Approx(0.7));
  CHECK(mdp.transition(centre, kUp, 39) == doctest::Approx(0.15));
  CHECK(mdp.transition(centre, kUp, 41) == doctest::Approx(0.15));
  CHECK(mdp.transition(centre, kUp, 49) == 0.0);
  // Top-left corner moving up: wall and left slip fold back.
  CHECK(mdp.transition(0, kUp, 0) == doctest::Approx(0.85));
  CHECK(mdp.transition(0, kUp, 1) == doctest::Approx(0.15));

  Rng again(1);
  auto [mdp2, w2] = random_gridworld(GridworldSpec{}, again);
  CHECK(mdp2.features() == mdp.features());
  CHECK(w2.values() == w.values());
}

TEST_CASE("terminal state") {
  Rng rng(2);
  auto [mdp, w] = terminalized_gridworld(GridworldSpec{}, 40, rng);
  for (std::size_t a = 0; a < 4; ++a) CHECK(mdp.transition(40, a, 40) == 1.0);
  CHECK(mdp.features().row(40).isZero());
  CHECK(value_iteration(mdp, w).v[40] == 0.0);
  CHECK_THROWS_AS(terminalized_gridworld(GridworldSpec{}, 81, rng), InvalidInput);
}

TEST_CASE("terrain task") {
  const TerrainTask task = terrain_task();
  CHECK(task.mdp.n_features() == 2);
  check_stochastic(task.mdp);
  const Policy pi = optimal_policy(policy_iteration(task.mdp, task.demo_reward));
  Rng rng(0);
  const Trajectory demo =
      rollout_to_terminal(task.mdp, pi, task.demo_start, task.terminal, 100, rng);
  REQUIRE(!demo.empty());
  CHECK(task.mdp.sample_next(demo.back().first, demo.back().second, rng) == task.terminal);
  // The demonstration detours around red.
  for (const auto& [s, a] : demo) {
    CHECK(task.mdp.features()(static_cast<Eigen::Index>(s), 1) == 0.0);
  }
  CHECK(task.mdp.initial_support() ==
        std::vector<std::size_t>{task.demo_start, task.transfer_start});
}

TEST_CASE("demonstration generation") {
  Rng rng(4);
  GridworldSpec det;
  det.slip = 0.0;
  auto [mdp, w] = random_gridworld(det, rng);
  const Policy pi = optimal_policy(policy_iteration(mdp, w));

  SUBCASE("noise-free demos follow the optimal policy") {
    const DemonstrationSet d = generate_demos(mdp, w, {9, 100, 0.0}, rng);
    CHECK(d.size() == 9);
    std::set<std::size_t> starts;
    for (const auto& traj : d.trajectories()) {
      CHECK(traj.size() == 100);
      starts.insert(traj.front().first);
      for (const auto& [s, a] : traj) CHECK(a == pi.action(s));
    }
    CHECK(starts.size() == 9);
  }
  SUBCASE("fully random demos have uniform actions") {
    const DemonstrationSet d = generate_demos(mdp, w, {100, 100, 1.0}, rng);
    std::array<double, 4> counts{};
    for (const auto& traj : d.trajectories())
      for (const auto& sa : traj) counts[sa.second] += 1.0;
    double chi2 = 0.0;
    for (double c : counts) chi2 += (c - 2500.0) * (c - 2500.0) / 2500.0;
    // 0.999 quantile of chi-square with 3 degrees of freedom.
    CHECK(chi2 < 16.27);
  }
  CHECK_THROWS_AS(generate_demos(mdp, w, {1, 0, 0.0}, rng), InvalidInput);
}

TEST_CASE("q-learning recovers a small gridworld policy") {
  GridworldSpec spec;
  spec.width = 5;
  spec.height = 5;
  spec.n_features = 4;
  spec.slip = 0.0;
  spec.start_cells = {{0, 0}};
  Rng rng(8);
  auto [mdp, w] = random_gridworld(spec, rng);
  const auto exact = value_iteration(mdp, w);
  auto cfg = default_q_learning_config(20000, 3);
  const auto learned = q_learning(TabularGenerativeModel(mdp), w, cfg);
  std::size_t agree = 0;
  for (Eigen::Index s = 0; s < 25; ++s) {
    Eigen::Index a;
    learned.q.row(s).maxCoeff(&a);
    // Count any exactly optimal action as agreement.
    agree += exact.q(s, a) >= exact.v[s] - 1e-6;
  }
  CHECK(agree >= 24);
}

TEST_CASE("driving state space") {
  DrivingSpec spec;
  CHECK(driving_state_count_unpruned(spec) == 2560);
  CHECK(driving_state_count(spec) == 5 * 7 * 7 * 7);
  for (std::size_t s = 0; s < driving_state_count(spec); s += 13) {
    CHECK(encode_driving_state(spec, decode_driving_state(spec, s)) == s);
  }
  const TabularMdp mdp = driving_mdp(spec);
  check_stochastic(mdp);
  for (Eigen::Index s = 0; s < mdp.features().rows(); ++s) {
    CHECK(mdp.features().row(s).sum() <= 2.0);
    CHECK(mdp.features().row(s).head(5).sum() == 1.0);
  }
  CHECK(driving_state_features(spec, 0).size() == 12);

  DrivingSpec capped = spec;
  capped.max_states = 100;
  CHECK_THROWS_AS(driving_mdp(capped), InvalidInput);
}

TEST_CASE("driving features and dynamics") {
  DrivingSpec spec;
  const TabularMdp mdp = driving_mdp(spec);
  // Lane 2 with a car level in lane 2 and one ahead in lane 3.
  const DrivingState s{2, {0b010, 0b100, 0}};
  const std::size_t idx = encode_driving_state(spec, s);
  CHECK(mdp.features()(static_cast<Eigen::Index>(idx), kCollisionFeature) == 1.0);
  const Eigen::VectorXd f = driving_state_features(spec, idx);
  CHECK(f[2] == 1.0);
  CHECK(f[5] == 1.0);
  CHECK(f[6] == 0.0);
  CHECK(f[11] == 1.0);
  // Steering right moves to lane 3, where the car from row 1 arrives.
  for (const auto& t : mdp.row(idx, kSteerRight)) {
    const DrivingState next = decode_driving_state(spec, t.next);
    CHECK(next.lane == 3);
    CHECK(next.rows[0] == 0b100);
    CHECK(next.rows[1] == 0);
  }
}

TEST_CASE("no traffic without spawns") {
  DrivingSpec spec;
  spec.spawn_prob = 0.0;
  const TabularMdp mdp = driving_mdp(spec);
  const Policy stay = Policy::deterministic(std::vector<std::size_t>(mdp.n_states(), kStay));
  for (auto s : reachable(mdp, stay)) {
    CHECK(mdp.features()(static_cast<Eigen::Index>(s), kCollisionFeature) == 0.0);
  }
}

TEST_CASE("scripted driving policies") {
  DrivingSpec spec;
  const TabularMdp mdp = driving_mdp(spec);
  const auto policies = scripted_driving_policies(spec, mdp);
  REQUIRE(policies.size() == 3);
  CHECK(policies[0].name == "right-safe");
  CHECK(policies[1].name == "on-road");
  CHECK(policies[2].name == "nasty");

  SUBCASE("right-safe rarely collides") {
    // Optimal play may still accept a collision to leave the shoulder.
    const Eigen::VectorXd mu = expected_feature_counts(mdp, policies[0].policy);
    CHECK(mu[kCollisionFeature] < 0.1);
    CHECK(mu[3] > mu[1] + mu[2]);
  }
  SUBCASE("collision ordering") {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(6);
    c[kCollisionFeature] = 1.0;
    const auto collision = RewardWeights::unit(c);
    const double safe = policy_value(mdp, collision, policies[0].policy);
    const double road = policy_value(mdp, collision, policies[1].policy);
    const double nasty = policy_value(mdp, collision, policies[2].policy);
    CHECK(safe < road);
    CHECK(road < nasty);
  }
  SUBCASE("on-road and nasty never leave the road") {
    for (std::size_t i : {1u, 2u}) {
      const Eigen::VectorXd mu = expected_feature_counts(mdp, policies[i].policy);
      CHECK(mu[0] + mu[4] <= 1e-9);
    }
  }
}

TEST_CASE("safe driving demonstration") {
  DrivingSpec spec;
  const TabularMdp mdp = driving_mdp(spec);
  Rng rng(5);
  const Trajectory demo = safe_driving_demo(spec, mdp, 100, rng);
  CHECK(demo.size() == 100);
  std::set<std::size_t> lanes;
  for (const auto& [s, a] : demo) {
    const DrivingState cur = decode_driving_state(spec, s);
    lanes.insert(cur.lane);
    const auto target = [&](std::size_t b) {
      if (b == kSteerLeft) return cur.lane - 1;
      if (b == kSteerRight) return cur.lane + 1;
      return cur.lane;
    };
    const auto ok = [&](std::size_t b) {
      const std::size_t lane = target(b);
      return lane >= 1 && lane <= 3 && !((cur.rows[1] >> (lane - 1)) & 1u);
    };
    CHECK(target(a) >= 1);
    CHECK(target(a) <= 3);
    if (ok(0) || ok(1) || ok(2)) CHECK(ok(a));
  }
  CHECK(*lanes.begin() >= 1);
  CHECK(*lanes.rbegin() <= 3);
  CHECK(lanes.size() >= 2);
}

}  // TEST_SUITE
