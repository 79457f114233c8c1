#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regforge/balanced.hpp"
#include "regforge/construction.hpp"
#include "regforge/partition.hpp"

namespace regforge {

// ---- Useful classes ---------------------------------------------------

struct UsefulReport {
  std::vector<bool> fine_useful;     // per class of B
  std::vector<long> useless_count;   // per class of A
  std::vector<bool> coarse_useful;   // per class of A
};

// A fine class is useful when some class of Pb beta-contains it; a coarse
// class is useful when its useless-subclass count stays below threshold * l.
UsefulReport classify_useful(const Partition& A, const Partition& B,
                             const Partition& Pb, const Rat& beta,
                             const Rat& threshold);

// ---- Helpful pairs ------------------------------------------------------

struct HelpfulPairCert {
  int t = 0, u = 0;        // classes of Z
  int i = 0, j = 0;        // containers in P_{r-1}
  int level = 0;           // Gowers level r whose splits are used
  long in_a = 0, in_b = 0; // |Z_t cap A_{i,j}|, |Z_t cap B_{i,j}|
  Rat beta;
  VertexSet z_t, z_u;
};

// All ordered class pairs (Z_t, Z_u), t != u, whose classes are
// beta-contained in clusters (X_i, X_j) of P_{r-1} and whose first class
// splits at least beta^2 each way across A_{i,j} / B_{i,j}.
std::vector<HelpfulPairCert> helpful_pairs(const BlockWeightedGraph& g,
                                           const Partition& Z, int level,
                                           const Rat& beta);

// ---- Peeling -------------------------------------------------------------

struct PeelStage {
  int level_index = 0;   // position in the trap-partition list
  bool descended = false;
  int cluster = -1;      // chosen cluster when descended
  long size_after = 0;
};

struct PeelTrace {
  VertexSet start, final_set;
  std::vector<PeelStage> stages;
  Rat delta;
  int descents = 0;
};

// Staged descent through the trap partitions: descend into a cluster holding
// at least a delta^6 fraction (largest count, ties to the lowest index),
// stop at the first level where every cluster holds less.
PeelTrace peel(const VertexSet& A, const std::vector<Partition>& trap_partitions,
               const Rat& delta);

// ---- Irregularity witnesses ----------------------------------------------

struct SourceDiscrepancy {
  LedgerEntry::Source source;
  int index;
  Rat d_a, d_b;  // per-source densities toward W_u from A' and B'
};

struct WitnessReport {
  bool found = false;
  VertexSet a_prime, b_prime, w_u;
  Rat d_a, d_b, d_pair;
  Rat discrepancy;  // |d_a - d_b|
  std::vector<SourceDiscrepancy> breakdown;
  PeelTrace peel_a, peel_b;
  // Claim-style diagnostics over the per-trap ledger terms.
  int first_trap_disc = 0;        // smallest trap index with |d_a - d_b| > 4 delta^2, 0 if none
  bool halfpoint_condition = false;  // |d_{l_u}(A',W_u) - alpha/2| > 2 delta^2
  std::vector<bool> a_in_single_cluster;  // per trap level
  // Which of the parameter inequalities the chosen (beta, delta, gamma)
  // satisfy on this run; reported, never asserted.
  std::vector<std::pair<std::string, bool>> parameter_checks;
  std::string to_json() const;
};

// Builds A', B' by peeling Z_t's split halves through the trap partitions,
// takes W_u as the larger split side of Z_u, and reports the exact density
// discrepancy with its full per-source ledger breakdown. A witness is
// declared when the discrepancy exceeds gamma and all size floors hold.
WitnessReport irregularity_witness(const BlockWeightedGraph& g,
                                   const HelpfulPairCert& cert,
                                   const Rat& delta, const Rat& gamma);

// ---- Balanced-vector lemma checker ----------------------------------------

struct BalancedVectorReport {
  bool applicable = false;
  std::string reason;
  long count = 0;  // indices j with min(sum_{A_j} lambda, sum_{B_j} lambda) > xi
  bool holds = false;
};

// Hypotheses: the family verified balanced, ||lambda||_1 = 1,
// ||lambda||_inf < 1 - zeta and (1-eta)(1-4 xi) > 1 - zeta + zeta^2;
// conclusion: count >= eta * m.
BalancedVectorReport check_balanced_vector_lemma(const BalancedFamily& fam,
                                                 const std::vector<Rat>& lambda,
                                                 const Rat& zeta, const Rat& eta,
                                                 const Rat& xi);

}  // namespace regforge
