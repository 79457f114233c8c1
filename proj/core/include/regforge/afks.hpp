#pragma once

#include <functional>
#include <string>
#include <vector>

#include "regforge/partition.hpp"
#include "regforge/regcheck.hpp"

namespace regforge {

// Mean-square density index over ordered class pairs, normalized to [0,1];
// never decreases under refinement.
Rat potential(const DensityView& view, const Partition& Z);

struct RefineOptions {
  int max_passes = 12;
  int witness_cap = 4;  // largest irregular pairs folded in per pass
  long max_order = 1 << 12;
  CheckOptions check;
};

struct RefinePass {
  long order_before = 0, order_after = 0;
  long irregular_found = 0;
  Rat potential_before, potential_after;
  Rat exchanged_fraction;  // vertices moved by rebalancing
};

struct RefineResult {
  Partition partition;
  bool regular_claimed = false;  // heuristic: no more than gamma*k^2 found
  std::vector<RefinePass> passes;
  Rat exchanged_total;
};

// Constructive refinement loop: collect witness sets from irregular pairs,
// split every class by their Venn atoms, re-equalize, repeat until at most
// gamma*k^2 irregular pairs are found or the pass budget runs out. The
// iteration below only relies on the output being a gamma-regular
// refinement, so any refiner with that contract can stand in here.
RefineResult szemeredi_refine(const DensityView& view, const Partition& start,
                              const Rat& gamma, const RefineOptions& opt = {});

struct TrapMark {
  int trap_g = 0;
  int level = 0;
  bool strictly_between = false;  // finer than A_i and beta-refined by B_i
  bool order_hypothesis = false;  // k_i^2 <= m_b
  Rat beta_used;
};

struct IterationStep {
  long k = 0, l = 0;
  bool cond1 = false, cond2 = false;
  Rat good_fraction;
  Rat potential_value;
  std::vector<TrapMark> traps;
  long irregular_found = 0;
  std::vector<RefinePass> refine_passes;
};

struct IterationTrace {
  std::vector<IterationStep> steps;
  std::string stop_reason;  // "regular", "budget"
  std::string to_json() const;
  std::string to_csv() const;
};

struct AfksOptions {
  std::function<Rat(long)> f = [](long x) { return frac(1, x); };
  int budget = 8;
  RefineOptions refine;
  Rat beta_cap = frac(127, 256);  // beta used for trap cross-checks is
                                  // min(eps^{1/5}-analog, beta_cap)
};

// The iterated strong-regularity process: A_1 of order ceil(1/eps), each
// B_i = szemeredi_refine(A_i, f(|A_i|)), stop when both conditions of the
// (eps, f)-regularity definition hold. The trace marks, per step and per
// trap, whether the trap partition lies strictly between A_i and B_i.
IterationTrace afks_iterate(const DensityView& view,
                            const BlockWeightedGraph* traps_from,
                            const Rat& eps, const AfksOptions& opt = {});

}  // namespace regforge
