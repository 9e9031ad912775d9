#include <benchmark/benchmark.h>

#include "hopcap/experiment.hpp"

using namespace hopcap;

namespace {

struct Fixture {
  Deployment dep;
  Tessellation t;
  RelayTable relays;
  Schedule schedule;
  std::vector<Route> routes;
};

Fixture make(std::size_t n) {
  auto dep = deploy(n, 1);
  auto t = build_tessellation(dep, rho_for_n(static_cast<double>(n), 1.0), 1);
  auto relays = RelayTable::build(dep, t, RelayPolicy::nearest_center);
  auto schedule = build_schedule(t);
  std::vector<Route> routes;
  for (const auto& c : pick_connections(dep, 1)) {
    routes.push_back(straight_line_route(c, dep, t, relays));
  }
  return {std::move(dep), std::move(t), std::move(relays), std::move(schedule), std::move(routes)};
}

void BM_Tessellation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto dep = deploy(n, 1);
  const double rho = rho_for_n(static_cast<double>(n), 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_tessellation(dep, rho, 1));
  }
}
BENCHMARK(BM_Tessellation)->Arg(500)->Arg(2000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Traversal(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)));
  const auto conns = pick_connections(f.dep, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& c = conns[i++ % conns.size()];
    benchmark::DoNotOptimize(traverse_geodesic(f.dep.nodes[c.source], f.dep.nodes[c.destination], f.t));
  }
}
BENCHMARK(BM_Traversal)->Arg(500)->Arg(4000);

void BM_SampledTraversal(benchmark::State& state) {
  const auto f = make(2000);
  const auto conns = pick_connections(f.dep, 2);
  const double step = f.t.rho() / 50.0;
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& c = conns[i++ % conns.size()];
    benchmark::DoNotOptimize(
        sample_geodesic_cells(f.dep.nodes[c.source], f.dep.nodes[c.destination], f.t, step));
  }
}
BENCHMARK(BM_SampledTraversal);

void BM_Schedule(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_schedule(f.t));
  }
}
BENCHMARK(BM_Schedule)->Arg(2000)->Arg(4000)->Unit(benchmark::kMicrosecond);

// Slots per second of the saturated loop, where every scheduled cell transmits.
void BM_SaturatedSlots(benchmark::State& state) {
  const auto f = make(static_cast<std::size_t>(state.range(0)));
  EngineConfig cfg = saturated_mode(EngineConfig{});
  cfg.inject = false;
  cfg.warmup_slots = 0;
  cfg.drain_slots = 0;
  cfg.measure_slots = 10 * f.schedule.num_colors();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run(f.dep, f.t, f.schedule, f.routes, LinkModel::logistic(), RadioParams{}, cfg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.measure_slots));
}
BENCHMARK(BM_SaturatedSlots)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BernoulliSlots(benchmark::State& state) {
  const auto f = make(2000);
  EngineConfig cfg;
  cfg.lambda = 2e-4;
  cfg.measure_slots = 20'000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        run(f.dep, f.t, f.schedule, f.routes, LinkModel::logistic(), RadioParams{}, cfg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.measure_slots));
}
BENCHMARK(BM_BernoulliSlots)->Unit(benchmark::kMillisecond);

void BM_ExpectedDeltaPowL(benchmark::State& state) {
  double d = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(expected_delta_pow_L(d));
    d = d < 0.9 ? d + 1e-6 : 0.3;
  }
}
BENCHMARK(BM_ExpectedDeltaPowL);

}  // namespace

BENCHMARK_MAIN();
