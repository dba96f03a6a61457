#include <benchmark/benchmark.h>

#include <cmath>

#include "arachne/parallel.hpp"

using namespace arachne;
using parallel::Exec;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

std::vector<kinematics::FootPosition> targets(std::size_t n)
{
  sensors::RandomStream rng(1);
  const auto g = gait::default_model().leg;
  std::vector<kinematics::FootPosition> out(n);
  for (auto& t : out) {
    t = kinematics::foot_position(g, {rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2), rng.uniform(-2.0, 2.0)});
  }
  return out;
}

std::vector<parallel::Ray> rays(std::size_t n)
{
  sensors::RandomStream rng(2);
  std::vector<parallel::Ray> out(n);
  for (auto& r : out) {
    r.origin = {rng.uniform(0.2, 3.8), rng.uniform(0.2, 2.8)};
    r.heading = rng.uniform(-M_PI, M_PI);
  }
  return out;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

}  // namespace

static void BM_BatchIk(benchmark::State& state)
{
  const auto g = gait::default_model().leg;
  const auto t = targets(100000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel::batch_ik(g, t, kinematics::IkBranch::KneeUp, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.size()));
  label(state);
}
BENCHMARK(BM_BatchIk)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Raycast(benchmark::State& state)
{
  const auto sc = scenario::random_scenario(3);
  const auto r = rays(100000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel::batch_raycast(sc.world, r, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r.size()));
  label(state);
}
BENCHMARK(BM_Raycast)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Sweep(benchmark::State& state)
{
  const auto sc = scenario::random_scenario(3);
  const auto r = rays(100000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel::batch_sweep(sc.world, r, 0.12, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r.size()));
  label(state);
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_SensorTrials(benchmark::State& state)
{
  const sensors::SensorSuite suite;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel::sensor_trials(suite, 0.12, 5, 100000, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * 100000);
  label(state);
}
BENCHMARK(BM_SensorTrials)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_MultiArena(benchmark::State& state)
{
  SimConfig base;
  base.seed = 1;
  std::vector<scenario::Scenario> scenarios;
  for (std::uint64_t i = 0; i < 32; ++i) scenarios.push_back(scenario::random_scenario(1000 + i));
  for (auto _ : state) {
    benchmark::DoNotOptimize(parallel::batch_runs(base, scenarios, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scenarios.size()));
  label(state);
}
BENCHMARK(BM_MultiArena)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
