#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "regforge/afks.hpp"
#include "regforge/witnesslab.hpp"

using namespace regforge;

namespace {

struct SmallInstance {
  long n;
  std::vector<std::vector<int>> num;  // weights num/64
  DensityView view() const {
    DensityView v;
    v.n = n;
    const SmallInstance* self = this;
    v.cell = [self](long u, long w) { return frac(self->num[u][w], 64); };
    v.row_into = [self](long u, const VertexSet& B) {
      long s = 0;
      for (size_t w = B.find_first(); w != VertexSet::npos; w = B.find_next(w))
        s += self->num[u][w];
      return frac(s, 64);
    };
    return v;
  }
};

SmallInstance constant_instance(long n, int w) {
  SmallInstance inst;
  inst.n = n;
  inst.num.assign(n, std::vector<int>(n, w));
  return inst;
}

BlockWeightedGraph desk_h(int levels, const char* delta, std::vector<int> traps,
                          uint64_t seed) {
  ConstructionParams p;
  p.levels = levels;
  p.delta_base = parse_rational(delta);
  p.trap_levels = std::move(traps);
  p.seed = seed;
  TrapOverrides ov;
  ov.check_cond2 = false;
  return build_h(p, ov);
}

}  // namespace

TEST_CASE("potential of a constant graph is the squared constant") {
  SmallInstance inst = constant_instance(12, 16);  // weight 1/4
  auto view = inst.view();
  for (long k : {1L, 2L, 3L, 4L, 6L}) {
    Partition Z = Partition::canonical(12, k);
    CHECK(potential(view, Z) == frac(1, 16));
  }
}

TEST_CASE("potential of the single-class partition is d(V,V)^2") {
  Rng rng(17);
  SmallInstance inst;
  inst.n = 8;
  inst.num.assign(8, std::vector<int>(8, 0));
  for (long u = 0; u < 8; ++u)
    for (long v = u; v < 8; ++v)
      inst.num[u][v] = inst.num[v][u] = static_cast<int>(rng.below(65));
  auto view = inst.view();
  Partition Z = Partition::canonical(8, 1);
  VertexSet all(8);
  all.set();
  Rat d = view.density(all, all);
  CHECK(potential(view, Z) == d * d);
}

TEST_CASE("refinement never decreases the potential on 100 random triples") {
  Rng rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    long n = 8 + 4 * static_cast<long>(rng.below(4));  // 8..20
    SmallInstance inst;
    inst.n = n;
    inst.num.assign(n, std::vector<int>(n, 0));
    for (long u = 0; u < n; ++u)
      for (long v = u; v < n; ++v)
        inst.num[u][v] = inst.num[v][u] = static_cast<int>(rng.below(65));
    auto view = inst.view();
    // Random equal partition into k classes, refined by splitting each in two.
    long k = (n % 8 == 0) ? 4 : 2;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = static_cast<int>(n) - 1; i > 0; --i)
      std::swap(perm[i], perm[rng.below(static_cast<uint64_t>(i + 1))]);
    std::vector<VertexSet> coarse(k, VertexSet(n)), fine(2 * k, VertexSet(n));
    long cs = n / k;
    for (long i = 0; i < n; ++i) {
      coarse[i / cs].set(perm[i]);
      fine[i / (cs / 2)].set(perm[i]);
    }
    Partition C = Partition::from_classes(n, coarse);
    Partition F = Partition::from_classes(n, fine);
    REQUIRE(F.refines(C));
    CHECK(potential(view, F) >= potential(view, C));
  }
}

TEST_CASE("szemeredi_refine returns the start on constant graphs and gamma=1") {
  SmallInstance inst = constant_instance(16, 32);
  auto view = inst.view();
  Partition start = Partition::canonical(16, 4);
  auto r = szemeredi_refine(view, start, frac(1, 10));
  CHECK(r.regular_claimed);
  CHECK(r.partition.order() == 4);
  CHECK(r.exchanged_total == 0);

  Rng rng(5);
  SmallInstance noisy;
  noisy.n = 16;
  noisy.num.assign(16, std::vector<int>(16, 0));
  for (long u = 0; u < 16; ++u)
    for (long v = u; v < 16; ++v)
      noisy.num[u][v] = noisy.num[v][u] = static_cast<int>(rng.below(65));
  auto nview = noisy.view();
  auto r1 = szemeredi_refine(nview, start, Rat(1));
  CHECK(r1.regular_claimed);  // densities live in [0,1]; deviation cannot top 1
  CHECK(r1.partition.order() == 4);
}

TEST_CASE("szemeredi_refine on the desk construction is forced past the next level") {
  ConstructionParams p;
  p.levels = 3;
  p.delta_base = frac(1, 4);
  p.seed = 23;
  BlockWeightedGraph g = build_g(p);
  auto view = view_of(g);
  Partition start = g.canonical_level(1);  // order 2
  RefineOptions ro;
  ro.check.mode = CheckOptions::Mode::heuristic;
  ro.check.seed = 71;
  auto r = szemeredi_refine(view, start, frac(1, 512), ro);
  CHECK(r.partition.order() >= 4);  // at least the order of P_2
  CHECK(r.partition.refines(start));
  // Potential never decreases along the passes, and strictly increases on
  // every pass that actually refined.
  for (const auto& pass : r.passes) {
    CHECK(pass.potential_after >= pass.potential_before);
    if (pass.order_after > pass.order_before)
      CHECK(pass.potential_after > pass.potential_before);
    CHECK(pass.exchanged_fraction == 0);  // atom-aligned gcd splitting
  }
}

TEST_CASE("afks on a constant graph stops at the first step") {
  SmallInstance inst = constant_instance(16, 24);
  auto view = inst.view();
  auto trace = afks_iterate(view, nullptr, frac(1, 4));
  CHECK(trace.stop_reason == "regular");
  CHECK(trace.steps.size() == 1);
  CHECK(trace.steps[0].cond1);
  CHECK(trace.steps[0].cond2);
}

TEST_CASE("afks with eps near 1 is a single trivial step") {
  Rng rng(9);
  SmallInstance inst;
  inst.n = 12;
  inst.num.assign(12, std::vector<int>(12, 0));
  for (long u = 0; u < 12; ++u)
    for (long v = u; v < 12; ++v)
      inst.num[u][v] = inst.num[v][u] = static_cast<int>(rng.below(16));
  auto view = inst.view();
  auto trace = afks_iterate(view, nullptr, frac(3, 4));
  CHECK(trace.stop_reason == "regular");
  CHECK(trace.steps.size() == 1);
}

TEST_CASE("afks divisibility error names the initial order") {
  SmallInstance inst = constant_instance(10, 8);
  auto view = inst.view();
  CHECK_THROWS_WITH_AS(afks_iterate(view, nullptr, frac(1, 4)),
                       doctest::Contains("must divide"), Error);
}

TEST_CASE("desk H with two traps: cond2 fails exactly at straddle steps") {
  BlockWeightedGraph h = desk_h(5, "1/256", {4, 5}, 1);
  auto view = view_of(h);
  AfksOptions opt;
  opt.budget = 6;
  opt.refine.check.mode = CheckOptions::Mode::heuristic;
  opt.refine.check.seed = 2;
  auto trace = afks_iterate(view, &h, frac(1, 8), opt);

  REQUIRE(trace.steps.size() >= 2);
  CHECK(trace.stop_reason == "regular");
  // Orders never decrease.
  for (size_t i = 1; i < trace.steps.size(); ++i)
    CHECK(trace.steps[i].k >= trace.steps[i - 1].k);
  // cond2 fails exactly when a trap lies strictly between A_i and B_i.
  for (const auto& step : trace.steps) {
    bool straddle = false;
    for (const auto& t : step.traps) straddle |= t.strictly_between;
    CHECK(step.cond2 == !straddle);
  }
  CHECK(!trace.steps.front().cond2);
  CHECK(trace.steps.back().cond2);
  CHECK(!trace.to_csv().empty());
  CHECK(!trace.to_json().empty());
}

TEST_CASE("afks runs on sampled instances with integer edge-count densities") {
  BlockWeightedGraph h = desk_h(3, "1/4", {2}, 6);
  SampledGraph s = sample_unweighted(h, 128, 99);
  auto view = view_of(s);
  AfksOptions opt;
  opt.budget = 3;
  opt.refine.check.mode = CheckOptions::Mode::heuristic;
  opt.refine.check.seed = 4;
  opt.refine.max_order = 64;  // keep the rebalancing in the merge regime
  auto trace = afks_iterate(view, nullptr, frac(1, 4), opt);
  CHECK(!trace.steps.empty());
  for (size_t i = 1; i < trace.steps.size(); ++i)
    CHECK(trace.steps[i].k >= trace.steps[i - 1].k);
  // Exchanged fractions are reported (and may be nonzero here).
  for (const auto& step : trace.steps)
    for (const auto& pass : step.refine_passes)
      CHECK(pass.exchanged_fraction >= 0);
}

TEST_CASE("order-hypothesis straddle marks imply cond2 failure along the trace") {
  for (uint64_t seed : {3ull, 4ull, 5ull}) {
    BlockWeightedGraph h = desk_h(5, "1/256", {4, 5}, seed);
    auto view = view_of(h);
    AfksOptions opt;
    opt.budget = 6;
    opt.refine.check.mode = CheckOptions::Mode::heuristic;
    opt.refine.check.seed = seed * 31;
    auto trace = afks_iterate(view, &h, frac(1, 8), opt);
    for (const auto& step : trace.steps)
      for (const auto& t : step.traps)
        if (t.order_hypothesis && t.strictly_between) CHECK(!step.cond2);
  }
}
