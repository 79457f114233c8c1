#include "regforge/balanced.hpp"

namespace regforge {

long phi_of(long m) {
  if (m < 0) throw Error("phi: negative argument");
  long e = (m + 15) / 16;
  if (e >= 62) throw Error("phi: 2^" + std::to_string(e) + " exceeds desk scale");
  return 1L << e;
}

std::pair<bool, CoocWorst> verify_balanced(const BalancedFamily& fam) {
  CoocWorst worst;
  bool ok = true;
  for (long j = 0; j < fam.M; ++j)
    for (long j2 = j + 1; j2 < fam.M; ++j2) {
      long count = 0;
      for (long i = 0; i < fam.m; ++i)
        if (fam.a_side[i].test(j) == fam.a_side[i].test(j2)) ++count;
      if (count > worst.count || worst.j < 0) worst = {j, j2, count};
      if (4 * count > 3 * fam.m) ok = false;
    }
  return {ok, worst};
}

BalancedFamily generate_balanced(long m, Rng& rng, int retry_budget) {
  if (m < 1) throw Error("generate_balanced: need m >= 1");
  BalancedFamily fam;
  fam.m = m;
  fam.M = phi_of(m);
  if (m <= 16) {
    // phi(m) = 2 here; ({1},{2}) repeated is balanced outright.
    fam.a_side.assign(m, set_of(2, {0}));
    fam.verified = true;
    return fam;
  }
  CoocWorst best_failure;
  best_failure.count = -1;
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    fam.a_side.assign(m, VertexSet(fam.M));
    for (long i = 0; i < m; ++i)
      for (long j = 0; j < fam.M; ++j)
        if (rng.coin()) fam.a_side[i].set(j);
    auto [ok, worst] = verify_balanced(fam);
    if (ok) {
      fam.verified = true;
      return fam;
    }
    if (worst.count > best_failure.count) best_failure = worst;
  }
  throw Error("generate_balanced: retry budget exhausted for m=" +
              std::to_string(m) + "; worst co-occurrence " +
              std::to_string(best_failure.count) + " for pair (" +
              std::to_string(best_failure.j) + "," +
              std::to_string(best_failure.j2) + ") against bound 3m/4");
}

}  // namespace regforge
