#pragma once

#include <functional>
#include <vector>

#include "regforge/balanced.hpp"
#include "regforge/convexdecomp.hpp"
#include "regforge/partition.hpp"
#include "regforge/rng.hpp"

namespace regforge {

// Parameters for the weighted construction. Canonical orders follow
// m_r = m_{r-1} * phi(m_{r-1}); level r adds weight 4^{-r} * delta_base on
// the balanced-split blocks, and the g-th trap adds 4^{-g} on its edges.
struct ConstructionParams {
  int levels = 0;                // R
  Rat delta_base = frac(1, 64);
  std::vector<int> trap_levels;  // ascending, each in [1, levels]
  uint64_t seed = 0;
  long atoms_per_class = 1;      // atom grid refining the finest partition
  long max_atoms = 4096;         // memory guard

  std::vector<long> orders() const;  // m_0 .. m_R
  long atom_count() const;
  Rat level_weight(int r) const { return four_pow_neg(r) * delta_base; }
  static Rat trap_weight(int g) { return four_pow_neg(g); }
  void validate() const;
};

struct LedgerEntry {
  enum class Source { gowers, trap };
  Source source;
  int index;  // Gowers level r, or trap index g
  Rat amount;
};

inline bool operator==(const LedgerEntry& a, const LedgerEntry& b) {
  return a.source == b.source && a.index == b.index && a.amount == b.amount;
}

// The balanced split attached to the ordered class pair (i, j) at one level.
struct LevelSplit {
  VertexSet a_prime;  // A'_{i,j} over the M subclasses of X_i
  VertexSet a_atoms;  // A_{i,j} lifted to atoms
  VertexSet b_atoms;  // B_{i,j} = X_i \ A_{i,j}
};

struct PlacedTrap {
  int g = 0;      // 1-based placement index; weight 4^{-g}
  int level = 0;  // canonical level b
  Rat weight;
  AdjMatrix graph;  // over the m_b clusters of P_b
};

// Weighted complete graph over equal-sized atoms, every cell carrying its
// exact provenance ledger and the balanced splits used to build it.
class BlockWeightedGraph {
 public:
  long atoms() const { return atoms_; }
  long atom_size() const { return atom_size_; }
  const ConstructionParams& params() const { return params_; }
  const std::vector<long>& orders() const { return orders_; }

  const Rat& weight(long u, long v) const { return w_[cell(u, v)]; }
  const std::vector<LedgerEntry>& ledger(long u, long v) const {
    return ledger_[cell(u, v)];
  }

  long order_at_level(int r) const { return orders_.at(r); }
  long atoms_per_cluster(int r) const { return atoms_ / orders_.at(r); }
  int cluster_of(long atom, int r) const {
    return static_cast<int>(atom / atoms_per_cluster(r));
  }
  Partition canonical_level(int r) const;

  // Split for the ordered pair (i, j) of P_{r-1} classes, r in [1, R].
  const LevelSplit& split(int r, int i, int j) const;
  bool has_level(int r) const {
    return r >= 1 && r <= params_.levels;
  }

  const std::vector<PlacedTrap>& traps() const { return traps_; }

 private:
  size_t cell(long u, long v) const {
    if (u > v) std::swap(u, v);
    return static_cast<size_t>(u) * static_cast<size_t>(atoms_) +
           static_cast<size_t>(v);
  }

  ConstructionParams params_;
  long atoms_ = 0;
  long atom_size_ = 1024;
  std::vector<long> orders_;
  std::vector<Rat> w_;  // full symmetric matrix, canonical cell (u<=v) mirrored
  std::vector<std::vector<LedgerEntry>> ledger_;
  std::vector<std::vector<LevelSplit>> splits_;  // [r-1][i * m_{r-1} + j]
  std::vector<PlacedTrap> traps_;

  friend BlockWeightedGraph build_g(const ConstructionParams&);
  friend BlockWeightedGraph place_traps(BlockWeightedGraph,
                                        const std::vector<TrapSpec>&);
};

// Gowers-style weighted graph G: every level r pairs the classes of P_{r-1}
// (including i = j) with fresh balanced splits and adds 4^{-r} * delta_base
// on A x A and B x B.
BlockWeightedGraph build_g(const ConstructionParams& params);

// Adds the g-th trap (weight 4^{-g}) on every atom pair whose level-b
// clusters form an edge of the trap graph. Returns the modified copy.
BlockWeightedGraph place_traps(BlockWeightedGraph g,
                               const std::vector<TrapSpec>& traps);

// End-to-end H: build_g plus verified traps generated at the declared levels
// from the "traps" substream of params.seed.
BlockWeightedGraph build_h(const ConstructionParams& params,
                           const TrapOverrides& trap_overrides = {},
                           int trap_retries = 16);

struct AtomMultiset {
  std::vector<long> counts;
  long total() const;
  static AtomMultiset from_set(const VertexSet& s);
};

// Exact weighted density; within-atom pairs use the atom's self-weight cell.
Rat density(const BlockWeightedGraph& g, const AtomMultiset& A,
            const AtomMultiset& B);
Rat density(const BlockWeightedGraph& g, const VertexSet& A, const VertexSet& B);

// Per-source density decomposition of d(A, B), from the ledger.
struct SourceDensity {
  LedgerEntry::Source source;
  int index;
  Rat amount;
};
std::vector<SourceDensity> density_breakdown(const BlockWeightedGraph& g,
                                             const VertexSet& A,
                                             const VertexSet& B);

// 0/1 instance sampled from the weighted graph.
struct SampledGraph {
  long n = 0;
  long atom_size = 0;
  std::vector<VertexSet> adj;

  bool edge(long u, long v) const { return adj[u].test(v); }
  long edges_into(long u, const VertexSet& B) const {
    return static_cast<long>(intersection_count(adj[u], B));
  }
  Rat density(const VertexSet& A, const VertexSet& B) const;
};

// Every vertex pair appears independently with its cell's probability;
// deterministic per (seed, cell), independent of traversal order.
SampledGraph sample_unweighted(const BlockWeightedGraph& g, long n,
                               uint64_t seed);
// Same sampling over a bare weight matrix (e.g. a loaded graph dump).
SampledGraph sample_from_cells(long atoms,
                               const std::function<Rat(long, long)>& cell,
                               long n, uint64_t seed);

}  // namespace regforge
