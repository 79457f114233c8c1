#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "regforge/partition.hpp"
#include "regforge/rng.hpp"

namespace regforge {

// ---- Convex decomposition over uniform k-subset vectors -------------------

struct ConvexTerm {
  Rat coef;                  // nonnegative; all terms sum to 1
  std::vector<int> support;  // exactly k indices, ascending
};

struct ConvexDecomposition {
  int k = 0;
  std::vector<ConvexTerm> terms;
};

// Writes x (0 <= x_i <= 1/k, sum 1) as a convex combination of the vectors
// v_S, S a k-subset, by greedy peeling. Reconstruction is exact and the term
// count is at most 2n.
ConvexDecomposition decompose(const std::vector<Rat>& x, int k);

std::vector<Rat> reconstruct(const ConvexDecomposition& d, size_t n);

// ---- Traps -----------------------------------------------------------------

using AdjMatrix = std::vector<VertexSet>;  // symmetric 0/1, no loops

AdjMatrix random_graph_half(long m, Rng& rng);  // G(m, 1/2)
long count_edges(const AdjMatrix& q);

// e(R,R'): edges with one endpoint in R and one in R'; edges inside the
// intersection count twice.
long pair_edge_count(const AdjMatrix& q, const VertexSet& R, const VertexSet& Rp);

// Condition-1 set size ceil(sqrt(m)/4).
long cond1_set_size(long m);

// Small-scale replacements for the asymptotic trap constants. Slack widens
// the deviation bounds (condition 1: (1/4 + slack1)|R||R'|; condition 2:
// (1/k^2 + slack2)|R||R'|); the strict constants are unreachable below
// astronomical m.
struct TrapOverrides {
  bool check_cond1 = true;
  Rat cond1_slack = frac(1, 4);
  bool check_cond2 = true;
  int k_min = 2;
  int k_max = 0;  // 0: floor(log2 m_b)
  int size_exponent = 2;
  Rat cond2_slack = frac(1, 4);
  long long budget = 10'000'000;  // exhaustive iff total case count fits
  long sampled_trials = 20000;
  uint64_t seed = 0;  // sampled-mode replay seed
};

struct TrapWorstCase {
  std::vector<int> R, Rp;
  long e = 0;
  Rat deviation;  // |e - |R||R'|/2|
  Rat bound;
  // condition-2 context (unset for condition 1)
  long coarse_order = -1;
  int i = -1, j = -1, k = -1;
};

struct TrapVerification {
  bool cond1_pass = true, cond2_pass = true;
  bool exhaustive1 = true, exhaustive2 = true;
  long long cases1 = 0, cases2 = 0;
  std::optional<TrapWorstCase> worst1, worst2;
  Rat worst_ratio1;                 // max deviation / (|R||R'|) seen, cond 1
  std::map<int, Rat> worst_ratio2;  // per k, cond 2
  TrapOverrides params;
  bool pass() const { return cond1_pass && cond2_pass; }
  std::string to_json() const;
};

// Checks both trap conditions against the coarser canonical orders
// (ascending, each dividing m_b = |V(Q)|).
TrapVerification verify_trap(const AdjMatrix& q,
                             const std::vector<long>& coarser_orders,
                             const TrapOverrides& ov = {});

struct TrapSpec {
  int level = -1;  // canonical level b; set at placement time
  Rat weight = 0;  // 4^{-g}; set at placement time
  AdjMatrix graph;
  std::optional<TrapVerification> verification;
};

// Draws G(m_b, 1/2) and redraws until verify_trap passes; throws after the
// retry budget, carrying the best failed verification.
TrapSpec generate_trap(long m_b, const std::vector<long>& coarser_orders,
                       Rng& rng, const TrapOverrides& ov = {}, int retries = 16);

// ---- Quadratic-form bounds ---------------------------------------------

struct QuadformReport {
  Rat value;  // x^T Q y
  Rat g1, g2;
  bool applicable = false;
  std::string reason;  // filled when not applicable
  Rat bound_factor;    // c in |value - g1 g2/2| <= c g1 g2
  Rat deviation;
  bool holds = false;
};

// First trap bound: requires sum x = sum y = g >= sqrt(m)/2; checks
// |x^T Q y - g^2/2| <= bound_factor * g^2 (paper instance: 1/4; pass the
// trap's verified condition-1 ratio for the sharp transfer).
QuadformReport quadform_bounds(const AdjMatrix& q, const std::vector<Rat>& x,
                               const std::vector<Rat>& y,
                               const Rat& bound_factor = frac(1, 4));

struct Lem3Context {
  VertexSet xi_support, xj_support;  // coarse clusters holding x resp. y
  Rat delta;
  Rat delta_lo, delta_hi;     // admissible range for delta
  unsigned cap_exponent = 6;  // hypothesis: x_p/sum x < delta^cap_exponent
  Rat bound_factor;           // default 2 delta^2
  Lem3Context(VertexSet xi, VertexSet xj, Rat d)
      : xi_support(std::move(xi)), xj_support(std::move(xj)), delta(std::move(d)) {
    delta_hi = frac(1, 200);
    bound_factor = 2 * delta * delta;
  }
};

// Second trap bound, with the four hypotheses checked explicitly; hypothesis
// failures come back as applicable=false, never as bound violations.
QuadformReport quadform_bounds(const AdjMatrix& q, const std::vector<Rat>& x,
                               const std::vector<Rat>& y, const Lem3Context& ctx);

}  // namespace regforge
