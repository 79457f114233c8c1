#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "regforge/construction.hpp"
#include "regforge/io.hpp"

#include <sstream>

using namespace regforge;

namespace {

ConstructionParams desk_params(int levels, const char* delta,
                               std::vector<int> traps, uint64_t seed) {
  ConstructionParams p;
  p.levels = levels;
  p.delta_base = parse_rational(delta);
  p.trap_levels = std::move(traps);
  p.seed = seed;
  return p;
}

BlockWeightedGraph desk_h(const ConstructionParams& p) {
  TrapOverrides ov;
  ov.check_cond2 = false;
  return build_h(p, ov);
}

}  // namespace

TEST_CASE("orders follow the phi recurrence") {
  ConstructionParams p = desk_params(6, "1/64", {}, 1);
  p.max_atoms = 200;
  CHECK(p.orders() == std::vector<long>{1, 2, 4, 8, 16, 32, 128});
  p.levels = 7;
  CHECK_THROWS_WITH_AS(p.orders(), doctest::Contains("atom budget"), Error);
}

TEST_CASE("one-level build with delta_base 1: quarter weights on the split blocks") {
  ConstructionParams p = desk_params(1, "1", {}, 3);
  BlockWeightedGraph g = build_g(p);
  CHECK(g.atoms() == 2);
  // The single class pair is (X_1, X_1) split into atoms {0} and {1}.
  CHECK(g.weight(0, 0) == frac(1, 4));
  CHECK(g.weight(1, 1) == frac(1, 4));
  CHECK(g.weight(0, 1) == 0);
}

TEST_CASE("zero levels give the all-zero graph") {
  ConstructionParams p = desk_params(0, "1/4", {}, 1);
  BlockWeightedGraph g = build_g(p);
  CHECK(g.atoms() == 1);
  CHECK(g.weight(0, 0) == 0);
}

TEST_CASE("ledger reconstruction is exact and Gowers totals respect delta_base") {
  ConstructionParams p = desk_params(3, "1/16", {2}, 7);
  BlockWeightedGraph h = desk_h(p);
  Rat cap = p.delta_base / 3;
  for (long u = 0; u < h.atoms(); ++u)
    for (long v = u; v < h.atoms(); ++v) {
      Rat sum = 0, gsum = 0, tsum = 0;
      for (const LedgerEntry& e : h.ledger(u, v)) {
        sum += e.amount;
        (e.source == LedgerEntry::Source::gowers ? gsum : tsum) += e.amount;
      }
      CHECK(sum == h.weight(u, v));
      CHECK(gsum <= cap);          // geometric series 4^{-1}+4^{-2}+... < 1/3
      CHECK(gsum <= p.delta_base); // the coarse bound
      CHECK(tsum < frac(1, 3));
      CHECK(h.weight(u, v) <= 1);
    }
}

TEST_CASE("per-level discrepancy of full split sides is at least (2/3) delta_r") {
  ConstructionParams p = desk_params(3, "1/8", {}, 11);
  BlockWeightedGraph g = build_g(p);
  auto orders = p.orders();
  for (int r = 1; r <= p.levels; ++r) {
    Rat bound = frac(2, 3) * p.level_weight(r);
    long m = orders[r - 1];
    for (long i = 0; i < m; ++i)
      for (long j = 0; j < m; ++j) {
        const LevelSplit& sij = g.split(r, i, j);
        const LevelSplit& sji = g.split(r, j, i);
        Rat da = density(g, sij.a_atoms, sji.a_atoms);
        Rat db = density(g, sij.b_atoms, sji.a_atoms);
        Rat disc = da - db;
        if (disc < 0) disc = -disc;
        CHECK(disc >= bound);
      }
  }
}

TEST_CASE("empty trap graph leaves the weights unchanged") {
  ConstructionParams p = desk_params(2, "1/16", {2}, 5);
  BlockWeightedGraph g = build_g(p);
  TrapSpec empty;
  empty.level = 2;
  empty.graph.assign(4, VertexSet(4));
  BlockWeightedGraph h = place_traps(g, {empty});
  for (long u = 0; u < g.atoms(); ++u)
    for (long v = u; v < g.atoms(); ++v)
      CHECK(h.weight(u, v) == g.weight(u, v));
}

TEST_CASE("complete trap graph adds exactly 1/4 on every cross-cluster cell") {
  ConstructionParams p = desk_params(2, "1/16", {2}, 5);
  BlockWeightedGraph g = build_g(p);
  TrapSpec complete;
  complete.level = 2;
  complete.graph.assign(4, VertexSet(4));
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b) complete.graph[a].set(b);
  BlockWeightedGraph h = place_traps(g, {complete});
  for (long u = 0; u < g.atoms(); ++u)
    for (long v = u; v < g.atoms(); ++v) {
      Rat expect = g.weight(u, v);
      if (h.cluster_of(u, 2) != h.cluster_of(v, 2)) expect += frac(1, 4);
      CHECK(h.weight(u, v) == expect);
    }
}

TEST_CASE("two nested traps: ledger cells match a recount from the trap graphs") {
  ConstructionParams p = desk_params(3, "1/32", {2, 3}, 21);
  BlockWeightedGraph h = desk_h(p);
  const PlacedTrap& t1 = h.traps()[0];
  const PlacedTrap& t2 = h.traps()[1];
  CHECK(t1.weight == frac(1, 4));
  CHECK(t2.weight == frac(1, 16));
  bool saw_both = false;
  for (long u = 0; u < h.atoms(); ++u)
    for (long v = u; v < h.atoms(); ++v) {
      Rat expect_trap = 0;
      int c1u = h.cluster_of(u, t1.level), c1v = h.cluster_of(v, t1.level);
      int c2u = h.cluster_of(u, t2.level), c2v = h.cluster_of(v, t2.level);
      bool in1 = c1u != c1v && t1.graph[c1u].test(c1v);
      bool in2 = c2u != c2v && t2.graph[c2u].test(c2v);
      if (in1) expect_trap += t1.weight;
      if (in2) expect_trap += t2.weight;
      Rat got_trap = 0;
      for (const LedgerEntry& e : h.ledger(u, v))
        if (e.source == LedgerEntry::Source::trap) got_trap += e.amount;
      CHECK(got_trap == expect_trap);
      if (in1 && in2) saw_both = true;
    }
  CHECK(saw_both);
  // Trap contributions are symmetric in the pair order.
  for (long u = 0; u < h.atoms(); ++u)
    for (long v = 0; v < h.atoms(); ++v)
      CHECK(h.weight(u, v) == h.weight(v, u));
}

TEST_CASE("density: single vertices, constant graphs, and a brute-force cross-check") {
  ConstructionParams p = desk_params(2, "1/4", {}, 13);
  BlockWeightedGraph g = build_g(p);
  // Single vertices in atoms u, v give the cell weight.
  AtomMultiset a, b;
  a.counts.assign(g.atoms(), 0);
  b.counts.assign(g.atoms(), 0);
  a.counts[0] = 1;
  b.counts[2] = 1;
  CHECK(density(g, a, b) == g.weight(0, 2));

  // Whole graph against itself on a constant-weight graph gives the constant.
  ConstructionParams pc = desk_params(0, "0", {}, 1);
  BlockWeightedGraph constant = build_g(pc);
  VertexSet all(1);
  all.set(0);
  CHECK(density(constant, all, all) == 0);

  // Random multisets against an explicit vertex-expansion sum.
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    AtomMultiset A, B;
    A.counts.assign(g.atoms(), 0);
    B.counts.assign(g.atoms(), 0);
    for (long u = 0; u < g.atoms(); ++u) {
      A.counts[u] = static_cast<long>(rng.below(4));
      B.counts[u] = static_cast<long>(rng.below(4));
    }
    if (A.total() == 0 || B.total() == 0) continue;
    Rat brute = 0;
    for (long u = 0; u < g.atoms(); ++u)
      for (long v = 0; v < g.atoms(); ++v)
        brute += Rat(A.counts[u]) * Rat(B.counts[v]) * g.weight(u, v);
    brute /= Rat(A.total()) * Rat(B.total());
    CHECK(density(g, A, B) == brute);
  }
}

TEST_CASE("sampling: degenerate all-zero and all-one weights") {
  ConstructionParams p0 = desk_params(1, "0", {}, 2);
  BlockWeightedGraph zero = build_g(p0);
  SampledGraph s0 = sample_unweighted(zero, 16, 99);
  for (long u = 0; u < 16; ++u) CHECK(s0.adj[u].none());

  // All-one weights: hand-build by placing a complete trap three times over?
  // Simpler: check the complete block from a weight-1 cell via delta_base=1.
  ConstructionParams p1 = desk_params(1, "1", {}, 2);
  BlockWeightedGraph g1 = build_g(p1);
  SampledGraph s1 = sample_unweighted(g1, 8, 7);
  // Cells (0,0) and (1,1) have weight 1/4; cross cell is 0.
  for (long u = 0; u < 4; ++u)
    for (long v = 4; v < 8; ++v) CHECK(!s1.edge(u, v));

  CHECK_THROWS_WITH_AS(sample_unweighted(g1, 9, 7),
                       doctest::Contains("multiple"), Error);
}

TEST_CASE("sampling is deterministic under the seed") {
  ConstructionParams p = desk_params(2, "1/4", {2}, 3);
  BlockWeightedGraph h = desk_h(p);
  SampledGraph a = sample_unweighted(h, 64, 1234);
  SampledGraph b = sample_unweighted(h, 64, 1234);
  SampledGraph c = sample_unweighted(h, 64, 1235);
  bool same = true, diff = false;
  for (long u = 0; u < 64; ++u) {
    if (a.adj[u] != b.adj[u]) same = false;
    if (a.adj[u] != c.adj[u]) diff = true;
  }
  CHECK(same);
  CHECK(diff);
}

TEST_CASE("edge lists and trap graphs round-trip through their loaders") {
  ConstructionParams p = desk_params(2, "1/4", {2}, 3);
  BlockWeightedGraph h = desk_h(p);
  SampledGraph s = sample_unweighted(h, 32, 5);
  std::stringstream ss;
  save_edges_csv(s, ss);
  SampledGraph t = load_edges_csv(ss, 32, s.atom_size);
  for (long u = 0; u < 32; ++u) CHECK(s.adj[u] == t.adj[u]);

  std::stringstream qs;
  save_adj_csv(h.traps()[0].graph, qs);
  AdjMatrix q = load_adj_csv(qs, 4);
  for (size_t u = 0; u < 4; ++u) CHECK(q[u] == h.traps()[0].graph[u]);
}

TEST_CASE("sampling from a dumped weight matrix matches the source graph") {
  ConstructionParams p = desk_params(2, "1/8", {2}, 9);
  BlockWeightedGraph h = desk_h(p);
  GraphDump d = dump_of(h);
  SampledGraph a = sample_unweighted(h, 64, 77);
  SampledGraph b = sample_from_cells(
      d.atoms, [&d](long u, long v) { return d.weights[u][v]; }, 64, 77);
  for (long u = 0; u < 64; ++u) CHECK(a.adj[u] == b.adj[u]);
}

TEST_CASE("sampled block densities concentrate around the cell weights") {
  ConstructionParams p = desk_params(2, "1/2", {2}, 17);
  BlockWeightedGraph h = desk_h(p);
  long n = 1024;
  SampledGraph s = sample_unweighted(h, n, 4242);
  long hsize = n / h.atoms();
  for (long cu = 0; cu < h.atoms(); ++cu)
    for (long cv = cu + 1; cv < h.atoms(); ++cv) {
      VertexSet A(n), B(n);
      for (long x = 0; x < hsize; ++x) {
        A.set(cu * hsize + x);
        B.set(cv * hsize + x);
      }
      double got = s.density(A, B).get_d();
      double want = h.weight(cu, cv).get_d();
      CHECK(std::abs(got - want) < 0.05);
    }
}
