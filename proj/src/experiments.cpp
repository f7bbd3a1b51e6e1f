#include "irlbound/experiments.hpp"

#include "irlbound/baselines.hpp"
#include "irlbound/policy_improvement.hpp"
#include "irlbound/risk_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace irlbound {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_setting(const std::string& key, double value) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s=%g", key.c_str(), value);
  return buf;
}

template <typename T>
void read_opt(const io::Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

/// Runs `body(r)` for every replicate in parallel and concatenates the rows
/// in replicate order.
std::vector<ResultRow> for_replicates(
    const ExperimentConfig& cfg,
    const std::function<std::vector<ResultRow>(std::size_t)>& body) {
  const auto n = static_cast<std::ptrdiff_t>(cfg.replicates);
  std::vector<std::vector<ResultRow>> per(cfg.replicates);
  std::vector<std::exception_ptr> errors(cfg.replicates);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    try {
      per[static_cast<std::size_t>(r)] = body(static_cast<std::size_t>(r));
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<ResultRow> rows;
  for (auto& p : per) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

std::size_t max_demos(const ExperimentConfig& cfg) {
  return *std::max_element(cfg.demos_schedule.begin(), cfg.demos_schedule.end());
}

/// WFCB plus one VaR row per alpha for a fixed evaluation policy.
void append_bounds(std::vector<ResultRow>& rows, const ExperimentConfig& cfg,
                   std::size_t rep, std::size_t n_demos,
                   const std::string& setting, const TabularMdp& mdp,
                   const DemonstrationSet& demos, const PosteriorChain& chain,
                   const Policy& pi_eval, double true_evd) {
  const Eigen::VectorXd mu_eval = expected_feature_counts(mdp, pi_eval);
  const FeatureCountEstimate mu_hat =
      empirical_feature_counts(demos, mdp.features(), mdp.gamma());
  rows.push_back({rep, n_demos, "wfcb", wfcb(mu_hat, mu_eval), true_evd, setting});
  const EvdSamples z = evd_samples(mdp, chain, pi_eval, cfg.birl.solver_tol);
  for (double alpha : cfg.alpha_list) {
    const BoundReport r = var_bound(z, alpha, cfg.delta);
    rows.push_back({rep, n_demos, var_method(alpha), r.bound, true_evd, setting});
  }
}

Policy map_policy(const TabularMdp& mdp, const PosteriorChain& chain, double tol) {
  return optimal_policy(policy_iteration(mdp, map_reward(chain), tol));
}

}  // namespace

std::string var_method(double alpha) {
  return "var_" + std::to_string(static_cast<int>(std::lround(alpha * 100.0)));
}

void ExperimentConfig::validate() const {
  if (replicates == 0) throw InvalidInput("config: replicates must be >= 1");
  if (demos_schedule.empty()) throw InvalidInput("config: empty demos_schedule");
  for (auto n : demos_schedule) {
    if (n == 0) throw InvalidInput("config: demo counts must be >= 1");
  }
  for (double a : alpha_list) {
    if (!(a > 0.0 && a < 1.0)) throw InvalidInput("config: alpha must lie in (0, 1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("config: delta must lie in (0, 1)");
  for (double c : c_list) {
    if (!(c >= 0.0)) throw InvalidInput("config: c values must be nonnegative");
  }
  if (!(noise >= 0.0 && noise <= 1.0)) throw InvalidInput("config: noise must lie in [0, 1]");
  if (demo_horizon == 0) throw InvalidInput("config: demo_horizon must be >= 1");
  if (projection_iters == 0) throw InvalidInput("config: projection_iters must be >= 1");
  birl.validate();
  grid.validate();
  driving.validate();
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "grid-accuracy",   "noise-sweep",      "projection-compare",
      "driving-rank",    "eval-sensitivity", "improve"};
  return names;
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  if (experiment == "grid-accuracy") {
    cfg.birl.c = 100.0;
  } else if (experiment == "noise-sweep") {
    cfg.noise = 0.2;
  } else if (experiment == "projection-compare") {
    cfg.demos_schedule = {1, 5, 9};
    cfg.alpha_list = {0.95, 0.99};
  } else if (experiment == "driving-rank") {
    cfg.demos_schedule = {1};
    cfg.alpha_list = {0.95};
    cfg.birl.c = 10.0;
  } else if (experiment == "eval-sensitivity") {
    cfg.demos_schedule = {1, 9};
  } else if (experiment == "improve") {
    cfg.replicates = 5;
    cfg.demos_schedule = {1};
    cfg.alpha_list = {0.99};
    cfg.birl.burn_in = 1000;
    cfg.birl.init_candidates = 16;
  } else {
    throw InvalidInput("unknown experiment '" + experiment + "'");
  }
  return cfg;
}

ExperimentConfig config_from_json(const std::string& experiment, const io::Json& j) {
  ExperimentConfig cfg = default_config(experiment);
  try {
    if (j.contains("experiment") && j.at("experiment").get<std::string>() != experiment) {
      throw InvalidInput("config is for experiment '" +
                         j.at("experiment").get<std::string>() + "'");
    }
    read_opt(j, "replicates", cfg.replicates);
    read_opt(j, "seed", cfg.seed);
    read_opt(j, "demos_schedule", cfg.demos_schedule);
    read_opt(j, "alpha_list", cfg.alpha_list);
    read_opt(j, "delta", cfg.delta);
    read_opt(j, "c_list", cfg.c_list);
    read_opt(j, "noise", cfg.noise);
    read_opt(j, "demo_horizon", cfg.demo_horizon);
    read_opt(j, "x_list", cfg.x_list);
    read_opt(j, "projection_iters", cfg.projection_iters);
    read_opt(j, "climb_max_iters", cfg.climb_max_iters);
    if (j.contains("birl")) {
      io::Json merged = io::birl_config_to_json(cfg.birl);
      merged.update(j.at("birl"));
      cfg.birl = io::birl_config_from_json(merged);
    }
    if (j.contains("gridworld")) cfg.grid = io::gridworld_spec_from_json(j.at("gridworld"));
    if (j.contains("driving")) cfg.driving = io::driving_spec_from_json(j.at("driving"));
  } catch (const io::Json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

io::Json config_to_json(const ExperimentConfig& cfg) {
  return io::Json{{"experiment", cfg.experiment},
                  {"replicates", cfg.replicates},
                  {"seed", cfg.seed},
                  {"demos_schedule", cfg.demos_schedule},
                  {"alpha_list", cfg.alpha_list},
                  {"delta", cfg.delta},
                  {"c_list", cfg.c_list},
                  {"noise", cfg.noise},
                  {"demo_horizon", cfg.demo_horizon},
                  {"x_list", cfg.x_list},
                  {"projection_iters", cfg.projection_iters},
                  {"climb_max_iters", cfg.climb_max_iters},
                  {"birl", io::birl_config_to_json(cfg.birl)},
                  {"gridworld", io::gridworld_spec_to_json(cfg.grid)},
                  {"driving", io::driving_spec_to_json(cfg.driving)}};
}

Rng replicate_rng(std::uint64_t seed, std::size_t replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(replicate) >> 32)};
  return Rng(seq);
}

ExperimentOutput run_grid_accuracy(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentOutput out;
  out.rows = for_replicates(cfg, [&](std::size_t rep) {
    Rng rng = replicate_rng(cfg.seed, rep);
    auto [mdp, w_true] = random_gridworld(cfg.grid, rng);
    const DemonstrationSet all = generate_demos(
        mdp, w_true, {max_demos(cfg), cfg.demo_horizon, cfg.noise}, rng);
    std::vector<ResultRow> rows;
    for (std::size_t n : cfg.demos_schedule) {
      const DemonstrationSet demos = all.prefix(n);
      const PosteriorChain chain = policy_walk(mdp, demos, cfg.birl, rng);
      const Policy pi_eval = map_policy(mdp, chain, cfg.birl.solver_tol);
      append_bounds(rows, cfg, rep, n, "", mdp, demos, chain, pi_eval,
                    evd(mdp, w_true, pi_eval, cfg.birl.solver_tol));
    }
    return rows;
  });
  return out;
}

ExperimentOutput run_noise_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentOutput out;
  out.rows = for_replicates(cfg, [&](std::size_t rep) {
    Rng rng = replicate_rng(cfg.seed, rep);
    auto [mdp, w_true] = random_gridworld(cfg.grid, rng);
    const DemonstrationSet all = generate_demos(
        mdp, w_true, {max_demos(cfg), cfg.demo_horizon, cfg.noise}, rng);
    std::vector<ResultRow> rows;
    for (double c : cfg.c_list) {
      BirlConfig birl = cfg.birl;
      birl.c = c;
      for (std::size_t n : cfg.demos_schedule) {
        const DemonstrationSet demos = all.prefix(n);
        const PosteriorChain chain = policy_walk(mdp, demos, birl, rng);
        const Policy pi_eval = map_policy(mdp, chain, birl.solver_tol);
        append_bounds(rows, cfg, rep, n, format_setting("c", c), mdp, demos,
                      chain, pi_eval, evd(mdp, w_true, pi_eval, birl.solver_tol));
      }
    }
    return rows;
  });
  return out;
}

ExperimentOutput run_projection_comparison(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentOutput out;
  out.rows = for_replicates(cfg, [&](std::size_t rep) {
    Rng rng = replicate_rng(cfg.seed, rep);
    auto [mdp, w_true] = random_gridworld(cfg.grid, rng);
    const DemonstrationSet all = generate_demos(
        mdp, w_true, {max_demos(cfg), cfg.demo_horizon, cfg.noise}, rng);
    std::vector<ResultRow> rows;
    for (std::size_t n : cfg.demos_schedule) {
      const DemonstrationSet demos = all.prefix(n);
      const PosteriorChain chain = policy_walk(mdp, demos, cfg.birl, rng);
      const FeatureCountEstimate mu_hat =
          empirical_feature_counts(demos, mdp.features(), mdp.gamma());
      const Policy pi_eval =
          projection_algorithm(mdp, mu_hat, cfg.projection_iters).policy;
      const double true_evd = evd(mdp, w_true, pi_eval, cfg.birl.solver_tol);
      append_bounds(rows, cfg, rep, n, "", mdp, demos, chain, pi_eval, true_evd);
      rows.push_back({rep, n, "syed",
                      syed_epsilon(n, mdp.n_features(), mdp.gamma(), cfg.delta),
                      true_evd, ""});
      rows.push_back({rep, n, "abbeel",
                      abbeel_epsilon(n, mdp.n_features(), mdp.gamma(), cfg.delta),
                      true_evd, ""});
    }
    return rows;
  });
  return out;
}

ExperimentOutput run_driving_ranking(const ExperimentConfig& cfg) {
  cfg.validate();
  const TabularMdp mdp = driving_mdp(cfg.driving);
  const std::vector<ScriptedPolicy> policies = scripted_driving_policies(cfg.driving, mdp);
  ExperimentOutput out;
  out.rows = for_replicates(cfg, [&](std::size_t rep) {
    Rng rng = replicate_rng(cfg.seed, rep);
    std::vector<Trajectory> trajectories;
    for (std::size_t d = 0; d < max_demos(cfg); ++d) {
      trajectories.push_back(safe_driving_demo(cfg.driving, mdp, cfg.demo_horizon, rng));
    }
    const DemonstrationSet all(std::move(trajectories));
    std::vector<ResultRow> rows;
    for (std::size_t n : cfg.demos_schedule) {
      const DemonstrationSet demos = all.prefix(n);
      const PosteriorChain chain = policy_walk(mdp, demos, cfg.birl, rng);
      for (const auto& p : policies) {
        append_bounds(rows, cfg, rep, n, "policy=" + p.name, mdp, demos, chain,
                      p.policy, kNaN);
      }
    }
    return rows;
  });

  // Per replicate, demo count and method: policy names by increasing bound.
  std::map<std::tuple<std::size_t, std::size_t, std::string>,
           std::vector<std::pair<double, std::string>>>
      groups;
  for (const auto& row : out.rows) {
    groups[{row.replicate, row.n_demos, row.method}].emplace_back(
        row.bound, row.setting.substr(row.setting.find('=') + 1));
  }
  std::ostringstream ranking;
  ranking << "replicate,n_demos,method,first,second,third\n";
  for (auto& [key, entries] : groups) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    ranking << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key);
    for (const auto& e : entries) ranking << ',' << e.second;
    ranking << '\n';
  }
  out.files.emplace_back("ranking.csv", ranking.str());
  return out;
}

ExperimentOutput run_eval_sensitivity(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentOutput out;
  out.rows = for_replicates(cfg, [&](std::size_t rep) {
    Rng rng = replicate_rng(cfg.seed, rep);
    auto [mdp, w_true] = random_gridworld(cfg.grid, rng);
    const Policy pi_opt =
        optimal_policy(policy_iteration(mdp, w_true, cfg.birl.solver_tol));
    const DemonstrationSet all = generate_demos(
        mdp, w_true, {max_demos(cfg), cfg.demo_horizon, cfg.noise}, rng);
    std::vector<ResultRow> rows;
    for (std::size_t n : cfg.demos_schedule) {
      const DemonstrationSet demos = all.prefix(n);
      const PosteriorChain chain = policy_walk(mdp, demos, cfg.birl, rng);
      for (std::size_t x : cfg.x_list) {
        const Policy pi_eval =
            perturbed_policy(pi_opt, std::min(x, mdp.n_states()), mdp.n_actions(), rng);
        append_bounds(rows, cfg, rep, n, format_setting("x", static_cast<double>(x)),
                      mdp, demos, chain, pi_eval,
                      evd(mdp, w_true, pi_eval, cfg.birl.solver_tol));
      }
    }
    return rows;
  });
  return out;
}

ExperimentOutput run_policy_improvement(const ExperimentConfig& cfg) {
  cfg.validate();
  const TerrainTask task = terrain_task();
  const TabularMdp& mdp = task.mdp;
  const Policy pi_demo =
      optimal_policy(policy_iteration(mdp, task.demo_reward, cfg.birl.solver_tol));
  const double alpha = cfg.alpha_list.back();

  std::vector<io::Json> trajectories(cfg.replicates), policies(cfg.replicates);
  ExperimentOutput out;
  out.rows = for_replicates(cfg, [&](std::size_t rep) {
    Rng rng = replicate_rng(cfg.seed, rep);
    const DemonstrationSet demos({rollout_to_terminal(
        mdp, pi_demo, task.demo_start, task.terminal, cfg.demo_horizon, rng)});
    const PosteriorChain chain = policy_walk(mdp, demos, cfg.birl, rng);
    const Policy pi_init = map_policy(mdp, chain, cfg.birl.solver_tol);
    const HillClimbResult climb = var_hill_climb(
        mdp, chain, pi_init, alpha, cfg.delta, cfg.birl.solver_tol, cfg.climb_max_iters);

    const auto red = [&](const Policy& pi) {
      return expected_feature_counts(mdp, pi)[1];
    };
    io::Json bounds = io::Json::array();
    for (const auto& r : climb.trajectory) bounds.push_back(io::bound_to_json(r));
    trajectories[rep] = {{"replicate", rep}, {"reports", std::move(bounds)}};
    policies[rep] = {{"replicate", rep},
                     {"initial", io::policy_to_json(pi_init)},
                     {"final", io::policy_to_json(climb.policy)},
                     {"initial_red_occupancy", red(pi_init)},
                     {"final_red_occupancy", red(climb.policy)},
                     {"converged", climb.converged}};

    const std::string method = var_method(alpha);
    return std::vector<ResultRow>{
        {rep, 1, method, climb.trajectory.front().bound,
         evd(mdp, task.demo_reward, pi_init, cfg.birl.solver_tol), "policy=initial"},
        {rep, 1, method, climb.trajectory.back().bound,
         evd(mdp, task.demo_reward, climb.policy, cfg.birl.solver_tol), "policy=final"}};
  });
  out.files.emplace_back("trajectory.json", io::Json(trajectories).dump(2) + "\n");
  io::Json layout = task.layout;
  out.files.emplace_back(
      "policies.json",
      io::Json{{"layout", layout}, {"actions", {"up", "down", "left", "right"}},
               {"replicates", policies}}.dump(2) + "\n");
  return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "grid-accuracy") return run_grid_accuracy(cfg);
  if (e == "noise-sweep") return run_noise_sweep(cfg);
  if (e == "projection-compare") return run_projection_comparison(cfg);
  if (e == "driving-rank") return run_driving_ranking(cfg);
  if (e == "eval-sensitivity") return run_eval_sensitivity(cfg);
  if (e == "improve") return run_policy_improvement(cfg);
  throw InvalidInput("unknown experiment '" + e + "'");
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "replicate,n_demos,method,bound,true_evd,accurate,error,setting\n";
  for (const auto& r : rows) {
    os << r.replicate << ',' << r.n_demos << ',' << r.method << ','
       << format_double(r.bound) << ',' << format_double(r.true_evd) << ','
       << (std::isnan(r.true_evd) ? "nan" : (r.accurate() ? "1" : "0")) << ','
       << format_double(r.error()) << ',' << r.setting << '\n';
  }
  return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : config_to_json(cfg).dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

io::Json manifest(const ExperimentConfig& cfg, const ExperimentOutput& out) {
  io::Json files = io::Json::array({"results.csv"});
  for (const auto& f : out.files) files.push_back(f.first);
  return io::Json{{"experiment", cfg.experiment},
                  {"seed", cfg.seed},
                  {"replicates", cfg.replicates},
                  {"config_hash", config_hash(cfg)},
                  {"config", config_to_json(cfg)},
                  {"library", {{"name", "irlbound"}, {"version", kLibraryVersion}}},
                  {"rows", out.rows.size()},
                  {"files", files}};
}

void write_outputs(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                   const ExperimentOutput& out) {
  std::filesystem::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw InvalidInput("cannot write " + (dir / name).string());
    f << body;
  };
  write("results.csv", results_csv(out.rows));
  for (const auto& [name, body] : out.files) write(name, body);
  io::write_json(dir / "manifest.json", manifest(cfg, out));
}

}  // namespace irlbound
