#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "regforge/tower.hpp"

using namespace regforge;

namespace {

// Independent oracle: run the recurrences on plain big integers for as long
// as they stay materializable.
Int oracle_tower(int x) {
  Int v = 1;
  for (int i = 0; i < x; ++i) v = Int(1) << static_cast<unsigned long>(v.get_ui());
  return v;
}

std::vector<Int> oracle_tphi_prefix(int count) {
  std::vector<Int> out{Int(1)};
  Int v = 1;
  for (int i = 1; i <= count; ++i) {
    Int c = (v + 15) / 16;
    Int m = Int(1) << static_cast<unsigned long>(c.get_ui());
    v *= m;
    out.push_back(v);
  }
  return out;
}

}  // namespace

TEST_CASE("tower matches the big-integer recurrence while materializable") {
  for (int x = 0; x <= 5; ++x) {
    TowerNum t = TowerNum::tower(x);
    REQUIRE(t.is_exact());
    CHECK(t.exact_value() == oracle_tower(x));
  }
  CHECK(TowerNum::tower(0).exact_value() == 1);
  CHECK(TowerNum::tower(4).exact_value() == 65536);
}

TEST_CASE("tower(6) leaves the exact range and reports height 6") {
  TowerNum t6 = TowerNum::tower(6);
  CHECK(!t6.is_exact());
  CHECK(t6.is_tight());
  REQUIRE(t6.approx_height().has_value());
  CHECK(*t6.approx_height() == 6);
}

TEST_CASE("tower recurrence: tower(x+1) = 2^tower(x)") {
  for (int x = 0; x <= 8; ++x) {
    TowerNum next = TowerNum::tower(x + 1);
    TowerNum step = TowerNum::tower(x).pow2();
    CHECK(next.eq(step));
  }
}

TEST_CASE("wowzer small values and the tower composition") {
  CHECK(TowerNum::wowzer(0).exact_value() == 1);
  CHECK(TowerNum::wowzer(1).exact_value() == 2);
  CHECK(TowerNum::wowzer(2).exact_value() == 4);
  CHECK(TowerNum::wowzer(3).exact_value() == 65536);

  TowerNum w4 = TowerNum::wowzer(4);
  CHECK(!w4.is_exact());
  REQUIRE(w4.approx_height().has_value());
  CHECK(*w4.approx_height() == 65536);
  CHECK(w4.eq(TowerNum::tower(65536)));

  // W(x+1) = T(W(x)) including the first symbolic steps.
  for (int x = 0; x <= 6; ++x)
    CHECK(TowerNum::wowzer(x + 1).eq(TowerNum::tower_of(TowerNum::wowzer(x))));
}

TEST_CASE("t_phi sequence x=0..7 then 2^2063 at x=8") {
  std::vector<long> expect{1, 2, 4, 8, 16, 32, 128, 32768};
  auto oracle = oracle_tphi_prefix(8);
  for (int x = 0; x <= 7; ++x) {
    TowerNum t = TowerNum::t_phi(x);
    REQUIRE(t.is_exact());
    CHECK(t.exact_value() == expect[x]);
    CHECK(t.exact_value() == oracle[x]);
  }
  TowerNum t8 = TowerNum::t_phi(8);
  REQUIRE(t8.is_exact());
  CHECK(t8.exact_value() == oracle[8]);
  CHECK(t8.exact_value() == (Int(32768) * (Int(1) << 2048)));
  CHECK(t8.exact_value() == (Int(1) << 2063));
}

TEST_CASE("t_phi(x) >= tower(floor(x/2)) for x <= 16") {
  for (int x = 1; x <= 16; ++x) {
    TowerNum lhs = TowerNum::t_phi(x);
    TowerNum rhs = TowerNum::tower(x / 2);
    CHECK(lhs.geq(rhs));
  }
  CHECK(TowerNum::t_phi(8).geq(TowerNum::tower(4)));
}

TEST_CASE("comparison is total, antisymmetric and transitive on a mixed set") {
  std::vector<TowerNum> vals;
  for (int x = 0; x <= 9; ++x) vals.push_back(TowerNum::tower(x));
  for (int x = 0; x <= 6; ++x) vals.push_back(TowerNum::wowzer(x));
  for (int x = 0; x <= 14; ++x) vals.push_back(TowerNum::t_phi(x));
  vals.push_back(TowerNum::exact(Int(3)));
  vals.push_back(TowerNum::exact(Int(65535)));
  vals.push_back(TowerNum::exact(Int(1) << 1000));
  vals.push_back(TowerNum::tower(7).pow2());

  auto ord = [](const TowerNum& a, const TowerNum& b) {
    return TowerNum::compare(a, b);
  };
  for (size_t i = 0; i < vals.size(); ++i)
    for (size_t j = 0; j < vals.size(); ++j) {
      Ord ij = ord(vals[i], vals[j]);
      Ord ji = ord(vals[j], vals[i]);
      if (ij == Ord::less) CHECK(ji == Ord::greater);
      if (ij == Ord::greater) CHECK(ji == Ord::less);
      if (ij == Ord::equal) CHECK(ji == Ord::equal);
    }
  // Transitivity over the strict order.
  for (size_t i = 0; i < vals.size(); ++i)
    for (size_t j = 0; j < vals.size(); ++j)
      for (size_t k = 0; k < vals.size(); ++k)
        if (ord(vals[i], vals[j]) == Ord::less &&
            ord(vals[j], vals[k]) == Ord::less)
          CHECK(ord(vals[i], vals[k]) == Ord::less);
}

TEST_CASE("floor_log2 and floor_loglog act exactly on forms") {
  CHECK(TowerNum::tower(6).floor_log2().eq(TowerNum::tower(5)));
  CHECK(TowerNum::tower(8).floor_loglog().eq(TowerNum::tower(6)));
  CHECK(TowerNum::exact(Int(16)).floor_loglog().exact_value() == 2);
  CHECK(TowerNum::exact(Int(65536)).floor_loglog().exact_value() == 4);
}

TEST_CASE("trap schedule: desk-scale single level") {
  TrapSchedule ts = TrapSchedule::from_first_level(3, 1);
  CHECK(ts.levels == std::vector<long>{3});
  CHECK(ts.weights.size() == 1);
  CHECK(ts.weights[0] == Rat(1, 4));
}

TEST_CASE("trap schedule: w1=4 fails because w(2)=2 decreases") {
  CHECK_THROWS_WITH_AS(TrapSchedule::from_first_level(4, 2),
                       doctest::Contains("does not exceed"), Error);
}

TEST_CASE("trap schedule: symbolic w(2) for w1 >= 64 clears the W-type bound") {
  // w(2) = floor(log log T^phi(64)) compared against floor(log2(64/2 - 1)).
  for (long w1 : {64L, 80L, 128L}) {
    TowerNum tp = TowerNum::t_phi(w1);
    TowerNum w2 = tp.floor_loglog();
    long bound = regforge::floor_log2(Int(w1 / 2 - 1));
    CHECK(w2.geq(TowerNum::exact(Int(bound))));
    // And the same bound via the route T^phi(x) >= T(floor(x/2)).
    CHECK(tp.geq(TowerNum::tower(w1 / 2)));
  }
  // Large-count schedules are not materializable and must say so.
  CHECK_THROWS_WITH_AS(TrapSchedule::from_first_level(64, 2),
                       doctest::Contains("not materializable"), Error);
}

TEST_CASE("trap schedule weights sum below 1/3 for any count") {
  for (int count = 1; count <= 20; ++count) {
    std::vector<long> levels;
    for (int g = 0; g < count; ++g) levels.push_back(3 + g);
    TrapSchedule ts = TrapSchedule::from_levels(levels);
    CHECK(ts.total_weight() < Rat(1, 3));
  }
}

TEST_CASE("from_levels rejects non-increasing level lists") {
  CHECK_THROWS_AS(TrapSchedule::from_levels({2, 2}), Error);
  CHECK_THROWS_AS(TrapSchedule::from_levels({5, 3}), Error);
}
