#include <benchmark/benchmark.h>

#include "regforge/afks.hpp"
#include "regforge/witnesslab.hpp"

using namespace regforge;

namespace {

BlockWeightedGraph bench_graph(int levels, uint64_t seed) {
  ConstructionParams p;
  p.levels = levels;
  p.delta_base = frac(1, 16);
  p.seed = seed;
  return build_g(p);
}

void BM_BuildG(benchmark::State& state) {
  for (auto _ : state) {
    BlockWeightedGraph g = bench_graph(static_cast<int>(state.range(0)), 7);
    benchmark::DoNotOptimize(g.atoms());
  }
}
BENCHMARK(BM_BuildG)->Arg(3)->Arg(5)->Arg(6);

void BM_Density(benchmark::State& state) {
  BlockWeightedGraph g = bench_graph(static_cast<int>(state.range(0)), 7);
  VertexSet A(g.atoms()), B(g.atoms());
  for (long v = 0; v < g.atoms() / 2; ++v) A.set(v);
  for (long v = g.atoms() / 2; v < g.atoms(); ++v) B.set(v);
  for (auto _ : state) {
    Rat d = density(g, A, B);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_Density)->Arg(5)->Arg(6);

void BM_Decompose(benchmark::State& state) {
  long n = state.range(0);
  int k = static_cast<int>(n / 2);
  std::vector<Rat> x(n, frac(1, n));
  Rng rng(3);
  Rat cap = frac(1, k);
  for (long t = 0; t < 4 * n; ++t) {
    size_t i = rng.below(n), j = rng.below(n);
    if (i == j) continue;
    Rat headroom = cap - x[j];
    Rat room = std::min(x[i], headroom);
    if (room <= 0) continue;
    Rat moved = room * frac(static_cast<long>(rng.below(1025)), 1024);
    x[i] -= moved;
    x[j] += moved;
  }
  for (auto _ : state) {
    auto d = decompose(x, k);
    benchmark::DoNotOptimize(d.terms.size());
  }
}
BENCHMARK(BM_Decompose)->Arg(8)->Arg(16)->Arg(32);

void BM_TrapCond1(benchmark::State& state) {
  Rng rng(11);
  AdjMatrix q = random_graph_half(state.range(0), rng);
  TrapOverrides ov;
  ov.check_cond2 = false;
  for (auto _ : state) {
    auto v = verify_trap(q, {}, ov);
    benchmark::DoNotOptimize(v.cond1_pass);
  }
}
BENCHMARK(BM_TrapCond1)->Arg(16)->Arg(32)->Arg(64);

void BM_BalancedVerify(benchmark::State& state) {
  Rng rng(13);
  BalancedFamily fam = generate_balanced(state.range(0), rng);
  for (auto _ : state) {
    auto [ok, worst] = verify_balanced(fam);
    benchmark::DoNotOptimize(ok);
  }
}
BENCHMARK(BM_BalancedVerify)->Arg(17)->Arg(40)->Arg(64);

void BM_CheckPairExact(benchmark::State& state) {
  BlockWeightedGraph g = bench_graph(4, 9);
  auto view = view_of(g);
  VertexSet A(g.atoms()), B(g.atoms());
  long side = std::min<long>(state.range(0), g.atoms() / 2);
  for (long v = 0; v < side; ++v) A.set(v);
  for (long v = g.atoms() / 2; v < g.atoms() / 2 + side; ++v) B.set(v);
  for (auto _ : state) {
    auto verdict = check_pair(view, A, B, frac(1, 8));
    benchmark::DoNotOptimize(verdict.regular);
  }
}
BENCHMARK(BM_CheckPairExact)->Arg(6)->Arg(8);

void BM_Peel(benchmark::State& state) {
  std::vector<Partition> parts{Partition::canonical(128, 4),
                               Partition::canonical(128, 16),
                               Partition::canonical(128, 64)};
  Rng rng(15);
  VertexSet A(128);
  for (int i = 0; i < 40; ++i) A.set(rng.below(128));
  for (auto _ : state) {
    auto trace = peel(A, parts, frac(1, 2));
    benchmark::DoNotOptimize(trace.descents);
  }
}
BENCHMARK(BM_Peel);

}  // namespace

BENCHMARK_MAIN();
