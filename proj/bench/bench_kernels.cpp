#include <benchmark/benchmark.h>

#include "lawn/delivery.hpp"
#include "lawn/selection.hpp"
#include "lawn/topology.hpp"

using namespace lawn;

namespace {

Scenario large_scenario() {
  ScenarioConfig c;
  c.n_emt_uav = c.n_emt_terrestrial = 512;
  c.n_comm_users = 400;
  c.area_x = c.area_y = 8000.0;
  return generate_scenario(c);
}

Scenario selection_scenario(std::uint32_t users) {
  ScenarioConfig c;
  c.area_x = c.area_y = 400.0;
  c.n_emt_uav = c.n_emt_terrestrial = 2;
  c.n_comm_users = users;
  return generate_scenario(c);
}

template <TopologyGraph (*Build)(const Scenario&, const ChannelParams&, double, double)>
void BM_BuildGraph(benchmark::State& state) {
  const Scenario s = large_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(Build(s, {}, -95.0, kNoInterferenceEdges));
}
BENCHMARK(BM_BuildGraph<build_graph_serial>)->Name("build_graph/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildGraph<build_graph>)->Name("build_graph/parallel")->Unit(benchmark::kMillisecond);

template <bool Parallel>
void BM_Delivery(benchmark::State& state) {
  const Scenario s = generate_scenario(ScenarioConfig{});
  const TopologyGraph g = build_graph(s, {}, calibrate_threshold(s, {}, 4.0));
  for (auto _ : state) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(run_delivery_experiment(g, {}, 10000, 0));
    else
      benchmark::DoNotOptimize(run_delivery_experiment_serial(g, {}, 10000, 0));
  }
}
BENCHMARK(BM_Delivery<false>)->Name("delivery_10k/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Delivery<true>)->Name("delivery_10k/parallel")->Unit(benchmark::kMillisecond);

template <bool Parallel>
void BM_TopologyAware(benchmark::State& state) {
  const Scenario s = selection_scenario(64);
  const TopologyGraph g = build_graph(s, {}, calibrate_threshold(s, {}, 4.0));
  for (auto _ : state) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(select_topology_aware(g, {}, {}));
    else
      benchmark::DoNotOptimize(select_topology_aware_serial(g, {}, {}));
  }
}
BENCHMARK(BM_TopologyAware<false>)->Name("topology_aware_64/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TopologyAware<true>)->Name("topology_aware_64/parallel")->Unit(benchmark::kMillisecond);

template <bool Parallel>
void BM_BruteForce(benchmark::State& state) {
  const Scenario s = selection_scenario(12);
  const TopologyGraph g = build_graph(s, {}, calibrate_threshold(s, {}, 4.0));
  for (auto _ : state) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(select_brute_force(g, {}, {}));
    else
      benchmark::DoNotOptimize(select_brute_force_serial(g, {}, {}));
  }
}
BENCHMARK(BM_BruteForce<false>)->Name("brute_force_12/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForce<true>)->Name("brute_force_12/parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
