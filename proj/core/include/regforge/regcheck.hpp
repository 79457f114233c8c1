#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "regforge/construction.hpp"
#include "regforge/partition.hpp"

namespace regforge {

// Uniform access to a weighted block graph (universe = atoms) or a sampled
// 0/1 graph (universe = vertices). Densities are exact rationals either way.
struct DensityView {
  long n = 0;
  std::function<Rat(long, long)> cell;                  // w(u, v)
  std::function<Rat(long, const VertexSet&)> row_into;  // sum_{v in B} w(u, v)

  Rat density(const VertexSet& A, const VertexSet& B) const;
};

DensityView view_of(const BlockWeightedGraph& g);
DensityView view_of(const SampledGraph& s);

struct CheckOptions {
  enum class Mode { exact, heuristic };
  Mode mode = Mode::exact;
  long exact_cap = 14;  // largest side the exact enumeration accepts
  int restarts = 32;    // randomized restarts in heuristic mode
  uint64_t seed = 0;
  int threads = 1;  // pair scans fan out; results are thread-count invariant
};

struct RegularityWitness {
  VertexSet a_sub, b_sub;
  Rat d_sub, d_pair;
};

// Outcome of a gamma-regularity check. When regular=false the witness is
// present and revalidates exactly; a heuristic "regular" is not a proof.
struct RegularityVerdict {
  bool regular = true;
  std::optional<RegularityWitness> witness;
  CheckOptions::Mode mode = CheckOptions::Mode::exact;
  Rat gamma;
  std::string to_json() const;
};

RegularityVerdict check_pair(const DensityView& view, const VertexSet& A,
                             const VertexSet& B, const Rat& gamma,
                             const CheckOptions& opt = {});

struct PartitionCheck {
  bool regular = true;
  long pairs = 0;
  Rat threshold;  // gamma * k^2
  std::vector<std::pair<std::pair<int, int>, RegularityVerdict>> irregular;
};

// Counts irregular unordered class pairs against gamma * k^2.
PartitionCheck check_partition(const DensityView& view, const Partition& Z,
                               const Rat& gamma, const CheckOptions& opt = {});

struct GoodPairReport {
  int i = 0, j = 0;
  long deviant_count = 0;
  bool good = true;
  Rat pair_density;
};

struct EfReport {
  bool cond1 = false, cond2 = false;
  long k = 0, l = 0;
  long good_count = 0;
  Rat good_needed;  // (1 - eps) * C(k, 2)
  std::vector<GoodPairReport> reports;
};

struct GoodPairCount {
  bool cond2 = false;
  long k = 0, l = 0;
  long good_count = 0;
  Rat good_needed;
  std::vector<GoodPairReport> reports;
};

// The second condition alone: exact good-pair counting for B refining A.
GoodPairCount count_good_pairs(const DensityView& view, const Partition& A,
                               const Partition& B, const Rat& eps);

// Definition of (eps, f)-regularity for the pair (A, B), B exactly refining
// A. cond1 checks B for f_value-regularity; cond2 counts good pairs with
// exact densities; a deviation meeting eps exactly counts as deviant.
EfReport check_ef_regular(const DensityView& view, const Partition& A,
                          const Partition& B, const Rat& eps,
                          const Rat& f_value, const CheckOptions& opt = {});

struct BadPairWitness {
  std::vector<std::pair<int, int>> c1, c2;  // subpair indices (i', j')
  Rat gap;                                  // min over c1 minus max over c2
};

// Searches for two families of subpairs, each of size >= eps*l^2, separated
// by a density gap of at least 2*eps: sort the l^2 subpair densities and cut
// at the widest qualifying gap.
std::optional<BadPairWitness> bad_pair_witness(const DensityView& view,
                                               const Partition& A,
                                               const Partition& B, int i, int j,
                                               const Rat& eps);

}  // namespace regforge
