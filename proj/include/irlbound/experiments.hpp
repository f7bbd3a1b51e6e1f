#pragma once

// Desk-scale experiment harness. Every run is a pure function of its config:
// replicate r draws from its own RNG stream seeded by (seed, r), replicates
// run in parallel, and rows are gathered in replicate order.

#include "irlbound/birl.hpp"
#include "irlbound/environments.hpp"
#include "irlbound/io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace irlbound {

inline constexpr const char* kLibraryVersion = "0.1.0";

struct ExperimentConfig {
  std::string experiment;
  std::size_t replicates = 20;
  std::uint64_t seed = 1;
  std::vector<std::size_t> demos_schedule{1, 3, 5, 7, 9};
  std::vector<double> alpha_list{0.9, 0.95, 0.99};
  double delta = 0.05;
  /// Confidence values swept by noise-sweep; other experiments use birl.c.
  std::vector<double> c_list{1.0, 3.0, 10.0, 50.0};
  double noise = 0.0;
  std::size_t demo_horizon = 100;
  /// Perturbation counts for eval-sensitivity.
  std::vector<std::size_t> x_list{0, 2, 4, 8, 16, 32, 64};
  std::size_t projection_iters = 30;
  std::size_t climb_max_iters = 1000;
  BirlConfig birl;
  GridworldSpec grid;
  DrivingSpec driving;

  void validate() const;
};

/// Names accepted by default_config and run_experiment.
const std::vector<std::string>& experiment_names();
ExperimentConfig default_config(const std::string& experiment);
/// Overlays the keys present in `j` on default_config(experiment).
ExperimentConfig config_from_json(const std::string& experiment, const io::Json& j);
io::Json config_to_json(const ExperimentConfig& cfg);

struct ResultRow {
  std::size_t replicate = 0;
  std::size_t n_demos = 0;
  std::string method;
  double bound = 0.0;
  /// NaN when no ground-truth reward exists.
  double true_evd = 0.0;
  /// Experiment-specific sweep value, e.g. "c=3" or "policy=nasty".
  std::string setting;

  bool accurate() const { return bound >= true_evd; }
  double error() const { return bound - true_evd; }
};

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  /// Extra files written next to results.csv, keyed by file name.
  std::vector<std::pair<std::string, std::string>> files;
};

Rng replicate_rng(std::uint64_t seed, std::size_t replicate);

/// Worst-case loss of the MAP-reward policy for 1, 3, ... optimal demos.
ExperimentOutput run_grid_accuracy(const ExperimentConfig& cfg);
/// Noisy demos, sweeping the likelihood confidence.
ExperimentOutput run_noise_sweep(const ExperimentConfig& cfg);
/// Evaluation policy from the projection algorithm; VaR against the
/// sample-complexity baseline.
ExperimentOutput run_projection_comparison(const ExperimentConfig& cfg);
/// Ranks the three scripted driving policies from one safe demonstration.
ExperimentOutput run_driving_ranking(const ExperimentConfig& cfg);
/// Optimal policy perturbed at X random states.
ExperimentOutput run_eval_sensitivity(const ExperimentConfig& cfg);
/// VaR hill climbing on the terrain task.
ExperimentOutput run_policy_improvement(const ExperimentConfig& cfg);

ExperimentOutput run_experiment(const ExperimentConfig& cfg);

std::string results_csv(const std::vector<ResultRow>& rows);
/// FNV-1a of the canonical config dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);
io::Json manifest(const ExperimentConfig& cfg, const ExperimentOutput& out);

/// Writes results.csv, manifest.json and any extra files into `dir`.
void write_outputs(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                   const ExperimentOutput& out);

/// Method label for a VaR level, e.g. 0.95 -> "var_95".
std::string var_method(double alpha);

}  // namespace irlbound
