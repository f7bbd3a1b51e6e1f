#include "irlbound/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <filesystem>

using namespace irlbound;
using io::Json;

TEST_SUITE("io") {

TEST_CASE("mdp roundtrip") {
  Rng rng(1);
  const auto mdp = testing::random_mdp(5, 3, 4, 0.85, rng);
  const auto back = io::mdp_from_json(Json::parse(io::mdp_to_json(mdp).dump()));
  CHECK(back.n_states() == 5);
  CHECK(back.n_actions() == 3);
  CHECK(back.gamma() == 0.85);
  CHECK(back.features() == mdp.features());
  CHECK(back.initial_dist() == mdp.initial_dist());
  for (std::size_t s = 0; s < 5; ++s)
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t t = 0; t < 5; ++t)
        CHECK(back.transition(s, a, t) == mdp.transition(s, a, t));
}

TEST_CASE("demonstrations roundtrip") {
  const DemonstrationSet demos({{{0, 1}, {2, 0}}, {{0, 1}, {3, 2}}});
  const auto back = io::demos_from_json(io::demos_to_json(demos));
  CHECK(back.trajectories() == demos.trajectories());
  CHECK(back.flattened_pairs() == demos.flattened_pairs());
  CHECK_THROWS_AS(io::demos_from_json(Json::parse("[[[1,2,3]]]")), InvalidInput);
}

TEST_CASE("chain and bound roundtrip") {
  PosteriorChain chain;
  chain.samples = {RewardWeights::unit(Eigen::Vector2d(0.25, -0.75)),
                   RewardWeights::unit(Eigen::Vector2d(-1.0, 0.0))};
  chain.log_posteriors = {-1.5, -0.1};
  chain.accept_rate = 0.3;
  const auto back = io::chain_from_json(Json::parse(io::chain_to_json(chain).dump()));
  REQUIRE(back.samples.size() == 2);
  CHECK(back.samples[0].values() == chain.samples[0].values());
  CHECK(back.log_posteriors == chain.log_posteriors);
  CHECK(back.accept_rate == 0.3);

  BoundReport r{0.95, 0.05, 1000, 961, 0.123456789012345, false};
  const auto rb = io::bound_from_json(Json::parse(io::bound_to_json(r).dump()));
  CHECK(rb.k_index == 961);
  CHECK(rb.bound == r.bound);
  CHECK_FALSE(rb.saturated);
  CHECK_THROWS_AS(io::bound_from_json(Json::object()), InvalidInput);
}

TEST_CASE("specs keep defaults for missing keys") {
  const auto g = io::gridworld_spec_from_json(Json{{"slip", 0.1}});
  CHECK(g.slip == 0.1);
  CHECK(g.width == 9);
  CHECK(g.start_cells.size() == 9);
  const auto g5 = io::gridworld_spec_from_json(Json{{"width", 5}, {"height", 5}});
  CHECK(g5.start_cells.size() == 9);
  for (const auto& c : g5.start_cells) CHECK(c.row < 5);

  const auto d = io::driving_spec_from_json(Json{{"spawn_prob", 0.2}});
  CHECK(d.spawn_prob == 0.2);
  CHECK(d.window_rows == 3);
  const auto d2 = io::driving_spec_from_json(io::driving_spec_to_json(d));
  CHECK(d2.spawn_prob == d.spawn_prob);

  const auto b = io::birl_config_from_json(Json{{"c", 3.0}, {"init_candidates", 4}});
  CHECK(b.c == 3.0);
  CHECK(b.init_candidates == 4);
  CHECK(b.n_steps == BirlConfig{}.n_steps);
  const auto b2 = io::birl_config_from_json(io::birl_config_to_json(b));
  CHECK(b2.init_candidates == 4);
  CHECK_THROWS_AS(io::birl_config_from_json(Json{{"c", "high"}}), InvalidInput);
  CHECK_THROWS_AS(io::birl_config_from_json(Json{{"n_steps", 0}}), InvalidInput);
}

TEST_CASE("policy json") {
  CHECK(io::policy_to_json(Policy::deterministic({1, 0, 2})) == Json::parse("[1,0,2]"));
  CHECK(io::policy_to_json(Policy::uniform(1, 2)) == Json::parse("[[0.5,0.5]]"));
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "irlbound_io_test";
  std::filesystem::create_directories(dir);
  const Json j{{"a", 1}, {"b", {1.5, 2.5}}};
  io::write_json(dir / "x.json", j);
  CHECK(io::read_json(dir / "x.json") == j);
  CHECK_THROWS_AS(io::read_json(dir / "missing.json"), InvalidInput);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
