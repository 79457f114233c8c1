#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "regforge/partition.hpp"
#include "regforge/rng.hpp"

using namespace regforge;

TEST_CASE("canonical partitions are interval splits") {
  Partition p = Partition::canonical(32, 4);
  CHECK(p.order() == 4);
  CHECK(p.class_size() == 8);
  for (size_t v = 0; v < 32; ++v) CHECK(p.class_of(v) == static_cast<int>(v / 8));
  CHECK(p.cls(2).test(16));
  CHECK(p.cls(2).test(23));
  CHECK(!p.cls(2).test(24));

  Partition singles = Partition::canonical(8, 8);
  for (size_t i = 0; i < 8; ++i) CHECK(singles.cls(i).count() == 1);

  CHECK_THROWS_WITH_AS(Partition::canonical(10, 4),
                       doctest::Contains("must divide"), Error);
}

TEST_CASE("canonical chain refines exactly when orders divide") {
  Partition p4 = Partition::canonical(32, 4);
  Partition p8 = Partition::canonical(32, 8);
  Partition p16 = Partition::canonical(32, 16);
  CHECK(p8.refines(p4));
  CHECK(p16.refines(p8));
  CHECK(p16.refines(p4));
  CHECK(!p4.refines(p8));
}

TEST_CASE("beta_contains equality case and subset case") {
  // |Z|=10, |Z cap X|=9, beta=0.1: 9 >= 0.9*10 holds with equality.
  VertexSet Z(20), X(20);
  for (size_t v = 0; v < 10; ++v) Z.set(v);
  for (size_t v = 0; v < 9; ++v) X.set(v);
  CHECK(beta_contains(Z, X, Rat(1, 10)));
  X.reset(8);  // now |Z cap X| = 8
  CHECK(!beta_contains(Z, X, Rat(1, 10)));

  VertexSet big(20);
  for (size_t v = 0; v < 15; ++v) big.set(v);
  CHECK(beta_contains(Z, big, Rat(0)));  // Z subseteq X

  CHECK_THROWS_AS(beta_contains(Z, X, Rat(1, 2)), Error);
  CHECK_THROWS_AS(beta_contains(Z, X, Rat(3, 4)), Error);
}

TEST_CASE("at most one container exists for beta < 1/2") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    Partition P = Partition::canonical(24, 4);
    VertexSet Z(24);
    int size = 2 + static_cast<int>(rng.below(8));
    for (int j = 0; j < size; ++j) Z.set(rng.below(24));
    int containers = 0;
    for (size_t i = 0; i < P.order(); ++i)
      if (beta_contains(Z, P.cls(i), Rat(2, 5))) ++containers;
    CHECK(containers <= 1);
  }
}

TEST_CASE("beta_refines: exact refinement and identity") {
  Partition p4 = Partition::canonical(32, 4);
  Partition p8 = Partition::canonical(32, 8);
  auto r0 = beta_refines(p8, p4, Rat(0));
  CHECK(r0.refines);
  CHECK(r0.fraction == 1);
  auto rid = beta_refines(p4, p4, Rat(1, 10));
  CHECK(rid.refines);
  CHECK(rid.fraction == 1);
}

TEST_CASE("beta_refines matches an independent per-class recount") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    // Random equal partition of 64 vertices into 8 classes.
    std::vector<int> perm(64);
    for (int i = 0; i < 64; ++i) perm[i] = i;
    for (int i = 63; i > 0; --i)
      std::swap(perm[i], perm[rng.below(static_cast<uint64_t>(i + 1))]);
    std::vector<VertexSet> classes(8, VertexSet(64));
    for (int i = 0; i < 64; ++i) classes[i / 8].set(perm[i]);
    Partition Z = Partition::from_classes(64, classes);
    Partition P = Partition::canonical(64, 4);
    Rat beta(1, 10);

    auto got = beta_refines(Z, P, beta);
    // Recount independently, straight from the definition.
    size_t contained = 0;
    for (size_t t = 0; t < Z.order(); ++t) {
      size_t zt = Z.cls(t).count();
      bool has = false;
      for (size_t i = 0; i < P.order(); ++i) {
        size_t inter = (Z.cls(t) & P.cls(i)).count();
        if (Rat(static_cast<unsigned long>(10 * inter)) >=
            Rat(static_cast<unsigned long>(9 * zt)))
          has = true;
      }
      if (has) ++contained;
    }
    CHECK(got.fraction == frac(static_cast<long>(contained), 8));
    CHECK(got.refines ==
          (Rat(static_cast<unsigned long>(contained)) >= Rat(9, 10) * 8));
  }
}

TEST_CASE("partition file format round-trips") {
  Partition p = Partition::canonical(16, 4);
  std::stringstream ss;
  p.save(ss);
  std::string text = ss.str();
  CHECK(text.substr(0, 9) == "n=16 k=4\n");
  std::stringstream in(text);
  Partition q = Partition::load(in);
  CHECK(q.order() == p.order());
  for (size_t i = 0; i < p.order(); ++i) CHECK(q.cls(i) == p.cls(i));
}

TEST_CASE("from_classes validates equal sizes and coverage") {
  std::vector<VertexSet> bad{set_of(4, {0, 1, 2}), set_of(4, {3})};
  CHECK_THROWS_WITH_AS(Partition::from_classes(4, bad),
                       doctest::Contains("equal size"), Error);
  std::vector<VertexSet> overlap{set_of(4, {0, 1}), set_of(4, {1, 2})};
  CHECK_THROWS_AS(Partition::from_classes(4, overlap), Error);
}
