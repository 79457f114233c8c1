#pragma once

#include <vector>

#include "regforge/partition.hpp"
#include "regforge/rng.hpp"

namespace regforge {

// phi(m) = 2^ceil(m/16), the ground-set size paired with m balanced partitions.
long phi_of(long m);

// A family of m bipartitions (A_i, B_i) of [M]; B_i is the complement of A_i.
// Balanced: no element pair lies on the same side more than 3m/4 times.
struct BalancedFamily {
  long m = 0;
  long M = 0;
  std::vector<VertexSet> a_side;  // a_side[i] = A_i as a bitset over [M]
  bool verified = false;

  VertexSet b_side(size_t i) const {
    VertexSet b = a_side[i];
    b.flip();
    return b;
  }
};

struct CoocWorst {
  long j = -1, j2 = -1;
  long count = 0;
};

// Exhaustive check over all M(M-1)/2 pairs; returns the maximizing pair.
std::pair<bool, CoocWorst> verify_balanced(const BalancedFamily& fam);

// m <= 16: the deterministic family repeating ({1},{2}) over M=2.
// m >= 17: random draws, redrawn until verify_balanced passes. Throws after
// retry_budget failed draws, reporting the worst co-occurrence seen.
BalancedFamily generate_balanced(long m, Rng& rng, int retry_budget = 64);

}  // namespace regforge
