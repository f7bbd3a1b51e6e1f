// One PASS/FAIL line per acceptance criterion. Optional arguments select
// criteria by number, e.g. `acceptance 1 4 10`.

#include "irlbound/baselines.hpp"
#include "irlbound/experiments.hpp"
#include "irlbound/policy_improvement.hpp"
#include "irlbound/risk_bounds.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace irlbound;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double max_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::filesystem::path out_dir(const std::string& name) {
  return std::filesystem::path("acceptance_results") / name;
}

ExperimentOutput run_and_save(const ExperimentConfig& cfg) {
  ExperimentOutput out = run_experiment(cfg);
  write_outputs(out_dir(cfg.experiment), cfg, out);
  return out;
}

struct Stat {
  double sum = 0.0;
  double n = 0.0;
  void add(double x) { sum += x, n += 1.0; }
  double mean() const { return n > 0.0 ? sum / n : std::nan(""); }
};

Rng random_mdp_rng(std::uint64_t seed) { return Rng(seed); }

TabularMdp random_small_mdp(Rng& rng) {
  const std::size_t n = 5, m = 3, k = 4;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<std::vector<double>>> t(
      n, std::vector<std::vector<double>>(m, std::vector<double>(n)));
  for (auto& per_action : t) {
    for (auto& row : per_action) {
      double sum = 0.0;
      for (auto& p : row) sum += (p = u(rng) * u(rng));
      for (auto& p : row) p /= sum;
    }
  }
  Eigen::VectorXd d0(5);
  for (auto& x : d0) x = u(rng) + 0.01;
  d0 /= d0.sum();
  Eigen::MatrixXd phi(5, 4);
  for (auto& x : phi.reshaped()) x = u(rng);
  return TabularMdp::from_dense(0.9, t, d0, phi);
}

// 1 ---------------------------------------------------------------------
Outcome var_index_check() {
  const std::size_t k = var_index(1000, 0.95, 0.05).k;
  long worst = 0;
  for (std::size_t n : {50u, 100u, 500u, 1000u}) {
    for (double alpha : {0.9, 0.95, 0.99}) {
      const long diff = static_cast<long>(var_index(n, alpha, 0.05).k) -
                        static_cast<long>(var_index_exact_binomial(n, alpha, 0.05));
      worst = std::max(worst, std::labs(diff));
    }
  }
  return {k == 961 && worst <= 1,
          "k(1000,0.95,0.05)=" + std::to_string(k) +
              " max|k-exact|=" + std::to_string(worst)};
}

// 2 ---------------------------------------------------------------------
Outcome coverage_check() {
  // Exponential(1) losses; the true alpha-quantile is -ln(1 - alpha).
  const double alpha = 0.95, delta = 0.05;
  const double truth = -std::log(1.0 - alpha);
  Rng rng(2024);
  std::exponential_distribution<double> loss(1.0);
  std::size_t covered = 0;
  const std::size_t trials = 1000;
  for (std::size_t t = 0; t < trials; ++t) {
    EvdSamples z;
    z.z.resize(500);
    for (auto& x : z.z) x = loss(rng);
    covered += var_bound(z, alpha, delta).bound >= truth;
  }
  const double rate = static_cast<double>(covered) / trials;
  return {rate >= 0.92, fmt("coverage=%.3f over 1000 trials (N=500, alpha=0.95)", rate)};
}

// 3 ---------------------------------------------------------------------
Outcome geometry_check() {
  Rng rng(3);
  WalkState state{sample_l1_sphere(8, rng), kDefaultWalkStep};
  double drift = 0.0;
  for (int i = 0; i < 100000; ++i) {
    state.w = l1_ball_walk(state, rng);
    drift = std::max(drift, std::abs(state.w.lpNorm<1>() - 1.0));
  }
  std::array<double, 8> counts{};
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd w = sample_l1_sphere(3, rng);
    counts[(w[0] < 0) + 2 * (w[1] < 0) + 4 * (w[2] < 0)] += 1.0;
  }
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - n / 8.0) * (c - n / 8.0) / (n / 8.0);
  const double p = boost::math::cdf(
      boost::math::complement(boost::math::chi_squared_distribution<double>(7), chi2));
  return {drift <= 1e-9 && p > 0.01,
          fmt("max|norm-1|=%.2e chi2=%.3f p=%.4f", drift, chi2, p)};
}

// 4 ---------------------------------------------------------------------
Outcome value_check() {
  Rng rng = random_mdp_rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, 2);
  double worst_linear = 0.0, worst_evd = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const TabularMdp mdp = random_small_mdp(rng);
    Eigen::VectorXd raw(4);
    for (auto& x : raw) x = u(rng);
    const auto w = RewardWeights::normalized(raw);
    std::vector<std::size_t> a(5);
    for (auto& x : a) x = pick(rng);
    const Policy pi = Policy::deterministic(a);
    worst_linear = std::max(worst_linear,
                            std::abs(policy_value(mdp, w, pi) -
                                     w.values().dot(expected_feature_counts(mdp, pi))));
    const Policy opt = optimal_policy(policy_iteration(mdp, w));
    worst_evd = std::max(worst_evd, std::abs(evd(mdp, w, opt)));
  }
  return {worst_linear <= 1e-6 && worst_evd <= 2 * kDefaultSolverTol,
          fmt("max|V-w.mu|=%.2e max|EVD(opt)|=%.2e", worst_linear, worst_evd)};
}

// 5 ---------------------------------------------------------------------
Outcome grid_accuracy_check() {
  const auto cfg = default_config("grid-accuracy");
  const auto out = run_and_save(cfg);
  std::map<std::size_t, Stat> var_err, wfcb_err, var_acc;
  for (const auto& r : out.rows) {
    if (r.method == "var_95") {
      var_err[r.n_demos].add(r.error());
      var_acc[r.n_demos].add(r.accurate());
    } else if (r.method == "wfcb") {
      wfcb_err[r.n_demos].add(r.error());
    }
  }
  bool tighter = true;
  std::ostringstream os;
  for (std::size_t n : cfg.demos_schedule) {
    tighter = tighter && var_err[n].mean() < wfcb_err[n].mean();
    os << " m=" << n << ":" << fmt("%.3f/%.3f", var_err[n].mean(), wfcb_err[n].mean());
  }
  const double acc9 = var_acc[9].mean();
  return {acc9 >= 0.9 && tighter,
          fmt("var_95 accuracy@9=%.2f; mean error var/wfcb", acc9) + os.str()};
}

// 6 ---------------------------------------------------------------------
Outcome noise_sweep_check() {
  const auto out = run_and_save(default_config("noise-sweep"));
  std::map<std::string, Stat> acc, err;
  for (const auto& r : out.rows) {
    if (r.method != "var_95") continue;
    acc[r.setting].add(r.accurate());
    err[r.setting].add(r.error());
  }
  const bool ok = acc["c=3"].mean() > acc["c=50"].mean() &&
                  err["c=10"].mean() < err["c=1"].mean();
  return {ok, fmt("accuracy c=3 %.3f vs c=50 %.3f; mean error c=10 %.3f vs c=1 %.3f",
                  acc["c=3"].mean(), acc["c=50"].mean(), err["c=10"].mean(),
                  err["c=1"].mean())};
}

// 7 ---------------------------------------------------------------------
Outcome projection_check() {
  const auto cfg = default_config("projection-compare");
  const auto out = run_and_save(cfg);
  std::map<std::size_t, Stat> var;
  std::map<std::size_t, double> syed;
  for (const auto& r : out.rows) {
    if (r.method == "var_95") var[r.n_demos].add(r.bound);
    if (r.method == "syed") syed[r.n_demos] = r.bound;
  }
  const bool decreasing = var[1].mean() > var[5].mean() && var[5].mean() > var[9].mean();
  const double eps = syed_epsilon(1, 8, 0.9, 0.05);
  const bool ok = decreasing && std::abs(eps - 101.9) <= 0.5 &&
                  syed[1] >= 10.0 * var[1].mean();
  return {ok, fmt("mean var_95 m=1,5,9: %.4f %.4f %.4f; syed(1)=%.2f",
                  var[1].mean(), var[5].mean(), var[9].mean(), eps)};
}

// 8 ---------------------------------------------------------------------
Outcome driving_check() {
  const auto out = run_and_save(default_config("driving-rank"));
  std::map<std::size_t, std::map<std::string, double>> var;
  for (const auto& r : out.rows) {
    if (r.method == "var_95") var[r.replicate][r.setting] = r.bound;
  }
  std::size_t ordered = 0;
  for (auto& [rep, b] : var) {
    ordered += b["policy=right-safe"] < b["policy=on-road"] &&
               b["policy=on-road"] < b["policy=nasty"];
  }
  std::size_t wfcb_first = 0, wfcb_total = 0;
  std::istringstream ranking(out.files.at(0).second);
  std::string line;
  std::getline(ranking, line);
  while (std::getline(ranking, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    if (cols.size() == 6 && cols[2] == "wfcb") {
      ++wfcb_total;
      wfcb_first += cols[3] == "right-safe";
    }
  }
  const std::size_t n = var.size();
  const bool ok = n == 20 && ordered >= 18 && 2 * (wfcb_total - wfcb_first) > wfcb_total;
  return {ok, "var_95 correct order " + std::to_string(ordered) + "/" + std::to_string(n) +
                  "; wfcb ranks right-safe first " + std::to_string(wfcb_first) + "/" +
                  std::to_string(wfcb_total)};
}

// 9 ---------------------------------------------------------------------
Outcome improvement_check() {
  const auto cfg = default_config("improve");
  const auto out = run_and_save(cfg);
  io::Json traj, pols;
  for (const auto& [name, body] : out.files) {
    if (name == "trajectory.json") traj = io::Json::parse(body);
    if (name == "policies.json") pols = io::Json::parse(body);
  }
  bool ok = traj.size() == cfg.replicates;
  std::ostringstream os;
  for (std::size_t r = 0; r < traj.size(); ++r) {
    const auto& reports = traj[r].at("reports");
    for (std::size_t i = 1; i < reports.size(); ++i) {
      ok = ok && reports[i].at("bound").get<double>() <
                     reports[i - 1].at("bound").get<double>();
    }
    const auto& p = pols.at("replicates")[r];
    const double before = p.at("initial_red_occupancy").get<double>();
    const double after = p.at("final_red_occupancy").get<double>();
    ok = ok && after <= before && p.at("converged").get<bool>();
    os << fmt(" [%.3f->%.3f, red %.2f->%.2f]", reports.front().at("bound").get<double>(),
              reports.back().at("bound").get<double>(), before, after);
  }
  return {ok, "bound and red occupancy per replicate:" + os.str()};
}

// 10 --------------------------------------------------------------------
Outcome determinism_check() {
  const auto cfg = default_config("grid-accuracy");
  const std::string a = results_csv(run_experiment(cfg).rows);
  const std::string b = results_csv(run_experiment(cfg).rows);
  return {a == b && !a.empty(),
          "grid-accuracy results.csv identical on rerun: " + std::string(a == b ? "yes" : "no") +
              " (" + std::to_string(a.size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "var index", 1.0, var_index_check},
      {2, "bound coverage", 10.0, coverage_check},
      {3, "l1 geometry", 5.0, geometry_check},
      {4, "policy values", 5.0, value_check},
      {5, "grid accuracy", 1800.0, grid_accuracy_check},
      {6, "noise sweep", 2700.0, noise_sweep_check},
      {7, "projection comparison", 1800.0, projection_check},
      {8, "driving ranking", 1800.0, driving_check},
      {9, "policy improvement", 600.0, improvement_check},
      {10, "determinism", 1800.0, determinism_check},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.max_seconds;
    failures += !pass;
    std::printf("criterion %2d %s  %s: %s [%.1f s, limit %.0f s]\n", c.id,
                pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs, c.max_seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
