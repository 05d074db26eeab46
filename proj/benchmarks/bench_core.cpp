// Microbenchmarks for the hot paths: partition sums, abscissa bisection,
// truncated oracles, simplex assembly on deep truncations, the line-mass
// certificate, and the partial action axiom sweep.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "kmsgraph/classify.hpp"
#include "kmsgraph/families.hpp"
#include "kmsgraph/oracle.hpp"
#include "kmsgraph/paction.hpp"
#include "kmsgraph/phase.hpp"

namespace {

using namespace kmsgraph;

// Five vertices on a cycle with chords, all edges at the default weight.
// Every vertex lies on several overlapping cycles, so nothing short-circuits.
WeightedGraph dense5() {
  GraphSpec s;
  s.vertices = {"a", "b", "c", "d", "e"};
  auto edge = [&s](const char* id, const char* u, const char* v) {
    s.edges.push_back({id, u, v, {}});
  };
  edge("e1", "a", "b");
  edge("e2", "b", "c");
  edge("e3", "c", "d");
  edge("e4", "d", "e");
  edge("e5", "e", "a");
  edge("e6", "a", "c");
  edge("e7", "b", "d");
  edge("e8", "c", "e");
  edge("e9", "d", "a");
  edge("e10", "e", "b");
  return WeightedGraph::validate(s);
}

void BM_partition_values(benchmark::State& state) {
  WeightedGraph g = dense5();
  for (auto _ : state) benchmark::DoNotOptimize(partition_values(g, 2.2, 0));
}
BENCHMARK(BM_partition_values);

void BM_divergence_abscissa(benchmark::State& state) {
  WeightedGraph g = dense5();
  for (auto _ : state) benchmark::DoNotOptimize(divergence_abscissa(g, 0));
}
BENCHMARK(BM_divergence_abscissa);

void BM_critical_betas(benchmark::State& state) {
  WeightedGraph g = dense5();
  for (auto _ : state) benchmark::DoNotOptimize(critical_betas(g));
}
BENCHMARK(BM_critical_betas);

void BM_first_hit_sums(benchmark::State& state) {
  WeightedGraph g = dense5();
  for (auto _ : state) benchmark::DoNotOptimize(first_hit_sums(g, 2.2, 0));
}
BENCHMARK(BM_first_hit_sums);

void BM_oracle_partition(benchmark::State& state) {
  WeightedGraph g = dense5();
  std::size_t len = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(oracle_partition(g, 0, 2.2, len));
}
BENCHMARK(BM_oracle_partition)->Arg(60)->Arg(240);

void BM_simplex_truncation(benchmark::State& state) {
  FamilySpec f = parse_family("loop-ray");
  WeightedGraph g = truncate(f, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simplex(g, 0.5));
}
BENCHMARK(BM_simplex_truncation)->Arg(30)->Arg(60)->Arg(120);

void BM_extreme_state_deep(benchmark::State& state) {
  FamilySpec f = parse_family("loop-ray");
  WeightedGraph g = truncate(f, 200);
  for (auto _ : state) benchmark::DoNotOptimize(extreme_state(g, 0.5, 199));
}
BENCHMARK(BM_extreme_state_deep);

void BM_sweep(benchmark::State& state) {
  WeightedGraph g = dense5();
  std::vector<double> grid = beta_grid(0.0, 3.0, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(sweep(g, grid));
}
BENCHMARK(BM_sweep);

void BM_line_mass_bound(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(line_mass_bound(std::numbers::ln2, 400));
}
BENCHMARK(BM_line_mass_bound);

void BM_action_axioms(benchmark::State& state) {
  WeightedGraph g = dense5();
  std::size_t w = static_cast<std::size_t>(state.range(0));
  std::size_t p = static_cast<std::size_t>(state.range(1));
  std::size_t c = static_cast<std::size_t>(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(run_action_axioms(g, w, p, c));
}
BENCHMARK(BM_action_axioms)->Args({3, 4, 3})->Args({4, 6, 4});

}  // namespace

BENCHMARK_MAIN();
