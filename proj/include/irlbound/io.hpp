#pragma once

// JSON formats for MDPs, demonstrations, posterior chains, bound reports and
// environment specs.

#include "irlbound/birl.hpp"
#include "irlbound/environments.hpp"
#include "irlbound/risk_bounds.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace irlbound::io {

using Json = nlohmann::json;

/// Dense transition tensor as 3-level nested arrays; features as rows.
Json mdp_to_json(const TabularMdp& mdp);
TabularMdp mdp_from_json(const Json& j);

/// List of trajectories, each a list of [state, action] pairs.
Json demos_to_json(const DemonstrationSet& demos);
DemonstrationSet demos_from_json(const Json& j);

Json chain_to_json(const PosteriorChain& chain);
PosteriorChain chain_from_json(const Json& j);

Json bound_to_json(const BoundReport& r);
BoundReport bound_from_json(const Json& j);

Json policy_to_json(const Policy& pi);

/// Missing keys keep their defaults.
Json gridworld_spec_to_json(const GridworldSpec& spec);
GridworldSpec gridworld_spec_from_json(const Json& j);
Json driving_spec_to_json(const DrivingSpec& spec);
DrivingSpec driving_spec_from_json(const Json& j);
Json birl_config_to_json(const BirlConfig& cfg);
BirlConfig birl_config_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

}  // namespace irlbound::io
