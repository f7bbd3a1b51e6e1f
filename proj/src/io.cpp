#include "irlbound/io.hpp"

#include <fstream>

namespace irlbound::io {

namespace {

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("json key '") + key + "': " + e.what());
  }
}

}  // namespace

Json mdp_to_json(const TabularMdp& mdp) {
  const std::size_t n = mdp.n_states();
  Json transitions = Json::array();
  for (std::size_t s = 0; s < n; ++s) {
    Json per_action = Json::array();
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      std::vector<double> dense(n, 0.0);
      for (const auto& t : mdp.row(s, a)) dense[t.next] += t.prob;
      per_action.push_back(dense);
    }
    transitions.push_back(std::move(per_action));
  }
  Json features = Json::array();
  for (Eigen::Index s = 0; s < mdp.features().rows(); ++s) {
    std::vector<double> row(mdp.features().cols());
    for (Eigen::Index k = 0; k < mdp.features().cols(); ++k) {
      row[static_cast<std::size_t>(k)] = mdp.features()(s, k);
    }
    features.push_back(row);
  }
  const Eigen::VectorXd& d0 = mdp.initial_dist();
  return Json{{"n_states", n},
              {"n_actions", mdp.n_actions()},
              {"gamma", mdp.gamma()},
              {"transitions", std::move(transitions)},
              {"initial_dist", std::vector<double>(d0.data(), d0.data() + d0.size())},
              {"features", std::move(features)}};
}

TabularMdp mdp_from_json(const Json& j) {
  try {
    const auto n = j.at("n_states").get<std::size_t>();
    const auto m = j.at("n_actions").get<std::size_t>();
    const auto tensor =
        j.at("transitions").get<std::vector<std::vector<std::vector<double>>>>();
    if (tensor.size() != n) throw InvalidInput("mdp json: transitions size mismatch");
    for (const auto& per_action : tensor) {
      if (per_action.size() != m) throw InvalidInput("mdp json: n_actions mismatch");
    }
    const auto d0 = j.at("initial_dist").get<std::vector<double>>();
    const auto feats = j.at("features").get<std::vector<std::vector<double>>>();
    if (feats.size() != n || feats.empty()) {
      throw InvalidInput("mdp json: features must have one row per state");
    }
    Eigen::MatrixXd features(static_cast<Eigen::Index>(n),
                             static_cast<Eigen::Index>(feats.front().size()));
    for (std::size_t s = 0; s < n; ++s) {
      if (feats[s].size() != feats.front().size()) {
        throw InvalidInput("mdp json: ragged feature rows");
      }
      for (std::size_t k = 0; k < feats[s].size(); ++k) {
        features(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k)) =
            feats[s][k];
      }
    }
    return TabularMdp::from_dense(
        j.at("gamma").get<double>(), tensor,
        Eigen::Map<const Eigen::VectorXd>(d0.data(), static_cast<Eigen::Index>(d0.size())),
        std::move(features));
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("mdp json: ") + e.what());
  }
}

Json demos_to_json(const DemonstrationSet& demos) {
  Json out = Json::array();
  for (const auto& traj : demos.trajectories()) {
    Json t = Json::array();
    for (const auto& [s, a] : traj) t.push_back({s, a});
    out.push_back(std::move(t));
  }
  return out;
}

DemonstrationSet demos_from_json(const Json& j) {
  try {
    std::vector<Trajectory> trajectories;
    for (const auto& t : j) {
      Trajectory traj;
      for (const auto& pair : t) {
        if (pair.size() != 2) throw InvalidInput("demos json: expected [state, action]");
        traj.emplace_back(pair[0].get<std::size_t>(), pair[1].get<std::size_t>());
      }
      trajectories.push_back(std::move(traj));
    }
    return DemonstrationSet(std::move(trajectories));
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("demos json: ") + e.what());
  }
}

Json chain_to_json(const PosteriorChain& chain) {
  Json samples = Json::array();
  for (const auto& w : chain.samples) {
    samples.push_back(std::vector<double>(w.values().data(),
                                          w.values().data() + w.size()));
  }
  return Json{{"samples", std::move(samples)},
              {"log_posteriors", chain.log_posteriors},
              {"accept_rate", chain.accept_rate}};
}

PosteriorChain chain_from_json(const Json& j) {
  try {
    PosteriorChain chain;
    for (const auto& s : j.at("samples")) {
      const auto v = s.get<std::vector<double>>();
      chain.samples.push_back(RewardWeights::unit(
          Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))));
    }
    chain.log_posteriors = j.at("log_posteriors").get<std::vector<double>>();
    chain.accept_rate = j.at("accept_rate").get<double>();
    if (chain.log_posteriors.size() != chain.samples.size()) {
      throw InvalidInput("chain json: samples and log_posteriors differ in length");
    }
    return chain;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("chain json: ") + e.what());
  }
}

Json bound_to_json(const BoundReport& r) {
  return Json{{"alpha", r.alpha},     {"delta", r.delta},
              {"n_samples", r.n_samples}, {"k_index", r.k_index},
              {"bound", r.bound},     {"saturated", r.saturated}};
}

BoundReport bound_from_json(const Json& j) {
  try {
    BoundReport r;
    r.alpha = j.at("alpha").get<double>();
    r.delta = j.at("delta").get<double>();
    r.n_samples = j.at("n_samples").get<std::size_t>();
    r.k_index = j.at("k_index").get<std::size_t>();
    r.bound = j.at("bound").get<double>();
    r.saturated = j.at("saturated").get<bool>();
    return r;
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("bound json: ") + e.what());
  }
}

Json policy_to_json(const Policy& pi) {
  if (pi.is_deterministic()) return Json(pi.actions());
  Json rows = Json::array();
  for (Eigen::Index s = 0; s < pi.probs().rows(); ++s) {
    std::vector<double> row(static_cast<std::size_t>(pi.probs().cols()));
    for (Eigen::Index a = 0; a < pi.probs().cols(); ++a) {
      row[static_cast<std::size_t>(a)] = pi.probs()(s, a);
    }
    rows.push_back(row);
  }
  return rows;
}

Json gridworld_spec_to_json(const GridworldSpec& spec) {
  Json starts = Json::array();
  for (const auto& c : spec.start_cells) starts.push_back({c.row, c.col});
  return Json{{"width", spec.width},   {"height", spec.height},
              {"n_features", spec.n_features}, {"slip", spec.slip},
              {"gamma", spec.gamma},   {"start_cells", std::move(starts)}};
}

GridworldSpec gridworld_spec_from_json(const Json& j) {
  GridworldSpec spec;
  read_opt(j, "width", spec.width);
  read_opt(j, "height", spec.height);
  read_opt(j, "n_features", spec.n_features);
  read_opt(j, "slip", spec.slip);
  read_opt(j, "gamma", spec.gamma);
  if (j.contains("start_cells")) {
    spec.start_cells.clear();
    for (const auto& c : j.at("start_cells")) {
      spec.start_cells.push_back({c.at(0).get<std::size_t>(), c.at(1).get<std::size_t>()});
    }
  } else if (j.contains("width") || j.contains("height")) {
    spec.start_cells = GridworldSpec::default_start_cells(spec.width, spec.height);
  }
  spec.validate();
  return spec;
}

Json driving_spec_to_json(const DrivingSpec& spec) {
  return Json{{"n_lanes", spec.n_lanes},
              {"window_rows", spec.window_rows},
              {"spawn_prob", spec.spawn_prob},
              {"gamma", spec.gamma},
              {"max_states", spec.max_states}};
}

DrivingSpec driving_spec_from_json(const Json& j) {
  DrivingSpec spec;
  read_opt(j, "n_lanes", spec.n_lanes);
  read_opt(j, "window_rows", spec.window_rows);
  read_opt(j, "spawn_prob", spec.spawn_prob);
  read_opt(j, "gamma", spec.gamma);
  read_opt(j, "max_states", spec.max_states);
  spec.validate();
  return spec;
}

Json birl_config_to_json(const BirlConfig& cfg) {
  return Json{{"c", cfg.c},
              {"n_steps", cfg.n_steps},
              {"burn_in", cfg.burn_in},
              {"thin", cfg.thin},
              {"step_size", cfg.step_size},
              {"solver_tol", cfg.solver_tol},
              {"max_repair_sweeps", cfg.max_repair_sweeps},
              {"verify_fraction", cfg.verify_fraction},
              {"init_candidates", cfg.init_candidates}};
}

BirlConfig birl_config_from_json(const Json& j) {
  BirlConfig cfg;
  read_opt(j, "c", cfg.c);
  read_opt(j, "n_steps", cfg.n_steps);
  read_opt(j, "burn_in", cfg.burn_in);
  read_opt(j, "thin", cfg.thin);
  read_opt(j, "step_size", cfg.step_size);
  read_opt(j, "solver_tol", cfg.solver_tol);
  read_opt(j, "max_repair_sweeps", cfg.max_repair_sweeps);
  read_opt(j, "verify_fraction", cfg.verify_fraction);
  read_opt(j, "init_candidates", cfg.init_candidates);
  cfg.validate();
  return cfg;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace irlbound::io
