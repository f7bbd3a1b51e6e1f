// Serial reference kernels against their OpenMP counterparts.

#include "irlbound/environments.hpp"
#include "irlbound/kernels.hpp"
#include "irlbound/l1_geometry.hpp"

#include <benchmark/benchmark.h>

#include <map>

using namespace irlbound;

namespace {

struct Fixture {
  TabularMdp mdp;
  RewardWeights w;
  Eigen::VectorXd r;
  Eigen::VectorXd v;
  std::vector<RewardWeights> samples;
  Policy pi;
};

const Fixture& gridworld(std::size_t side) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(side);
  if (it == cache.end()) {
    GridworldSpec spec;
    spec.width = spec.height = side;
    spec.start_cells = GridworldSpec::default_start_cells(side, side);
    Rng rng(1);
    auto [mdp, w] = random_gridworld(spec, rng);
    Eigen::VectorXd r = state_rewards(mdp, w);
    Eigen::VectorXd v = value_iteration(mdp, w).v;
    std::vector<RewardWeights> samples;
    for (int i = 0; i < 32; ++i) samples.push_back(RewardWeights::unit(sample_l1_sphere(8, rng)));
    Policy pi = optimal_policy(policy_iteration(mdp, w));
    it = cache.emplace(side, Fixture{std::move(mdp), std::move(w), std::move(r),
                                     std::move(v), std::move(samples), std::move(pi)})
             .first;
  }
  return it->second;
}

void BM_BackupSerial(benchmark::State& state) {
  const auto& f = gridworld(static_cast<std::size_t>(state.range(0)));
  Eigen::VectorXd out(f.v.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::bellman_optimal_backup_serial(f.mdp, f.r, f.v, out));
  }
}

void BM_BackupParallel(benchmark::State& state) {
  const auto& f = gridworld(static_cast<std::size_t>(state.range(0)));
  Eigen::VectorXd out(f.v.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::bellman_optimal_backup(f.mdp, f.r, f.v, out));
  }
}

void BM_QValuesSerial(benchmark::State& state) {
  const auto& f = gridworld(static_cast<std::size_t>(state.range(0)));
  Eigen::MatrixXd q;
  for (auto _ : state) {
    kernels::q_values_serial(f.mdp, f.r, f.v, q);
    benchmark::DoNotOptimize(q.data());
  }
}

void BM_QValuesParallel(benchmark::State& state) {
  const auto& f = gridworld(static_cast<std::size_t>(state.range(0)));
  Eigen::MatrixXd q;
  for (auto _ : state) {
    kernels::q_values(f.mdp, f.r, f.v, q);
    benchmark::DoNotOptimize(q.data());
  }
}

void BM_EvdBatchSerial(benchmark::State& state) {
  const auto& f = gridworld(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::evd_batch_serial(f.mdp, f.samples, f.pi, 1e-8));
  }
}

void BM_EvdBatchParallel(benchmark::State& state) {
  const auto& f = gridworld(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::evd_batch(f.mdp, f.samples, f.pi, 1e-8));
  }
}

}  // namespace

BENCHMARK(BM_BackupSerial)->Arg(9)->Arg(30);
BENCHMARK(BM_BackupParallel)->Arg(9)->Arg(30);
BENCHMARK(BM_QValuesSerial)->Arg(9)->Arg(30);
BENCHMARK(BM_QValuesParallel)->Arg(9)->Arg(30);
BENCHMARK(BM_EvdBatchSerial)->Arg(9)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvdBatchParallel)->Arg(9)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
