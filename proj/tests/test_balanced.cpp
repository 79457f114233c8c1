#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "regforge/balanced.hpp"

using namespace regforge;

namespace {

// Independent recount: bit-matrix over (element, partition index).
std::pair<bool, long> recount_oracle(const BalancedFamily& fam) {
  bool ok = true;
  long worst = 0;
  for (long j = 0; j < fam.M; ++j)
    for (long j2 = j + 1; j2 < fam.M; ++j2) {
      long c = 0;
      for (long i = 0; i < fam.m; ++i) {
        bool sj = fam.a_side[i].test(j);
        bool sj2 = fam.a_side[i].test(j2);
        if ((sj && sj2) || (!sj && !sj2)) ++c;
      }
      worst = std::max(worst, c);
      if (c * 4 > 3 * fam.m) ok = false;
    }
  return {ok, worst};
}

}  // namespace

TEST_CASE("phi matches 2^ceil(m/16)") {
  CHECK(phi_of(1) == 2);
  CHECK(phi_of(16) == 2);
  CHECK(phi_of(17) == 4);
  CHECK(phi_of(32) == 4);
  CHECK(phi_of(33) == 8);
  CHECK(phi_of(128) == 256);
}

TEST_CASE("m <= 16 gives the deterministic ({1},{2}) family") {
  Rng rng(1);
  BalancedFamily fam = generate_balanced(8, rng);
  CHECK(fam.M == 2);
  CHECK(fam.m == 8);
  CHECK(fam.verified);
  auto [ok, worst] = verify_balanced(fam);
  CHECK(ok);
  // Elements 1 and 2 never share a side, so every co-occurrence count is 0.
  CHECK(worst.count == 0);
}

TEST_CASE("m=17 over M=4 verifies exhaustively at a fixed seed") {
  Rng rng(7);
  BalancedFamily fam = generate_balanced(17, rng);
  CHECK(fam.M == 4);
  CHECK(fam.verified);
  auto [ok, worst] = verify_balanced(fam);
  CHECK(ok);
  CHECK(worst.count * 4 <= 3 * 17);  // <= 12
  CHECK(worst.count <= 12);
}

TEST_CASE("m=32 over M=4: co-occurrence at most 24") {
  Rng rng(11);
  BalancedFamily fam = generate_balanced(32, rng);
  auto [ok, worst] = verify_balanced(fam);
  CHECK(ok);
  CHECK(worst.count <= 24);
}

TEST_CASE("identical bipartitions with M=4 fail for every m >= 1") {
  for (long m : {1L, 4L, 9L}) {
    BalancedFamily fam;
    fam.m = m;
    fam.M = 4;
    fam.a_side.assign(m, set_of(4, {0, 1}));
    auto [ok, worst] = verify_balanced(fam);
    CHECK(!ok);
    CHECK(worst.count == m);  // a same-side pair co-occurs every time
  }
}

TEST_CASE("empty family is vacuously balanced") {
  BalancedFamily fam;
  fam.m = 0;
  fam.M = 4;
  auto [ok, worst] = verify_balanced(fam);
  CHECK(ok);
  CHECK(worst.j >= 0);  // a maximizing pair is still reported
  CHECK(worst.count == 0);
}

TEST_CASE("verify_balanced agrees with the bit-matrix recount on 100 random families") {
  Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    BalancedFamily fam;
    fam.M = 2 + static_cast<long>(rng.below(7));  // M <= 8
    fam.m = 1 + static_cast<long>(rng.below(64)); // m <= 64
    fam.a_side.assign(fam.m, VertexSet(fam.M));
    for (long i = 0; i < fam.m; ++i)
      for (long j = 0; j < fam.M; ++j)
        if (rng.coin()) fam.a_side[i].set(j);
    auto [ok, worst] = verify_balanced(fam);
    auto [ok2, worst2] = recount_oracle(fam);
    CHECK(ok == ok2);
    CHECK(worst.count == worst2);
  }
}

TEST_CASE("generated families always carry verified=true") {
  Rng rng(5);
  for (long m : {1L, 16L, 17L, 24L, 33L}) {
    BalancedFamily fam = generate_balanced(m, rng);
    CHECK(fam.verified);
  }
}
