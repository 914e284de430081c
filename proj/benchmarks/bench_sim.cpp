#include <benchmark/benchmark.h>

#include <vector>

#include "sponge/dynamics.hpp"
#include "sponge/harness.hpp"
#include "sponge/simulator.hpp"

namespace {

using namespace sponge;

void BM_Tick(benchmark::State& state) {
  const auto variant = state.range(0) ? Variant::Modular : Variant::SemiModular;
  Simulator sim(default_config(variant, BellowsKind::Printed, static_cast<std::size_t>(state.range(1))));
  const std::vector<double> q_d(sim.config().robot.n(), 0.1);
  for (auto _ : state) {
    sim.tick(q_d);
    benchmark::DoNotOptimize(sim.state().q.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Tick)->ArgsProduct({{0, 1}, {1, 3, 6, 12}});

void BM_GravityTorques(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  TwinConfig c = default_config(Variant::Modular, BellowsKind::Printed, n);
  c.robot.base_orientation = BaseOrientation::Horizontal;
  const ChainModel m = ChainModel::from_config(c.robot);
  std::vector<double> q(n, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(gravity_torques(q, m));
}
BENCHMARK(BM_GravityTorques)->RangeMultiplier(2)->Range(1, 32);

void BM_TrackingRun(benchmark::State& state) {
  const TwinConfig c = default_config(Variant::Modular);
  RampSuite r;
  r.duration_s = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(run_tracking(c, r).summary);
}
BENCHMARK(BM_TrackingRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
