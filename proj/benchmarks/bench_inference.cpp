#include <benchmark/benchmark.h>

#include <optional>

#include "mobinfer/evaluation.hpp"
#include "mobinfer/extraction.hpp"
#include "mobinfer/inference.hpp"
#include "mobinfer/rwp.hpp"

using namespace mobinfer;

namespace {

RwpConfig scenario(int nodes, double duration) {
  RwpConfig cfg;
  cfg.node_count = nodes;
  cfg.anchors = {{250, 250}, {250, 750}, {750, 250}, {750, 750}};
  cfg.duration = duration;
  cfg.seed = 42;
  return cfg;
}

InferenceParams torus_params() {
  InferenceParams p;
  p.domain = Geometry::torus(1000, 1000);
  return p;
}

void BM_GenerateRwp(benchmark::State& state) {
  const auto cfg = scenario(static_cast<int>(state.range(0)), 300);
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_rwp(cfg));
  }
}
BENCHMARK(BM_GenerateRwp)->Arg(50)->Arg(200);

void BM_ExtractContacts(benchmark::State& state) {
  const auto movement = generate_rwp(scenario(static_cast<int>(state.range(0)), 300));
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_contacts(movement, 100, 1));
  }
}
BENCHMARK(BM_ExtractContacts)->Arg(50)->Arg(200);

void BM_Step(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto movement = generate_rwp(scenario(n, 300));
  const auto contacts = extract_contacts(movement, 100, 1);
  const auto params = torus_params();
  const ConstraintSet constraints(n);
  auto f0 = movement.frame(0);
  std::vector<NodeState> states(n);
  for (int i = 0; i < n; ++i) states[i].position = f0[i];
  double t = 0;
  for (auto _ : state) {
    states = step(states, contacts, constraints, t, params);
    t += params.dt;
    if (t + params.dt > contacts.duration()) t = 0;
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Step)->Arg(50)->Arg(200);

void BM_InferFullTrace(benchmark::State& state) {
  const auto movement = generate_rwp(scenario(50, 300));
  const auto contacts = extract_contacts(movement, 100, 1);
  auto f0 = movement.frame(0);
  const std::vector<Vec2> init(f0.begin(), f0.end());
  const auto params = torus_params();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        infer(contacts, ConstraintSet(50), init, params));
  }
}
BENCHMARK(BM_InferFullTrace)->Unit(benchmark::kMillisecond);

void BM_PairwiseCorrelation(benchmark::State& state) {
  const auto movement = generate_rwp(scenario(50, 300));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pairwise_distance_correlation(movement, movement));
  }
}
BENCHMARK(BM_PairwiseCorrelation)->Unit(benchmark::kMillisecond);

void BM_ContactQueries(benchmark::State& state) {
  const auto movement = generate_rwp(scenario(50, 300));
  const auto contacts = extract_contacts(movement, 100, 1);
  double t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(contacts.contacts_at(t));
    t += 0.1;
    if (t > contacts.duration()) t = 0;
  }
}
BENCHMARK(BM_ContactQueries);

}  // namespace

BENCHMARK_MAIN();
