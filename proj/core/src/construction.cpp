#include "regforge/construction.hpp"

#include <algorithm>

namespace regforge {

std::vector<long> ConstructionParams::orders() const {
  std::vector<long> m{1};
  for (int r = 1; r <= levels; ++r) {
    long prev = m.back();
    long next = prev * phi_of(prev);
    if (next > max_atoms)
      throw Error("construction: order m_" + std::to_string(r) + " = " +
                  std::to_string(next) + " exceeds the atom budget " +
                  std::to_string(max_atoms));
    m.push_back(next);
  }
  return m;
}

long ConstructionParams::atom_count() const {
  long atoms = orders().back() * atoms_per_class;
  if (atoms > max_atoms)
    throw Error("construction: " + std::to_string(atoms) +
                " atoms exceed the budget " + std::to_string(max_atoms));
  return atoms;
}

void ConstructionParams::validate() const {
  if (levels < 0) throw Error("construction: negative level count");
  if (delta_base < 0 || delta_base > 1)
    throw Error("construction: delta_base outside [0,1]");
  if (atoms_per_class < 1) throw Error("construction: atoms_per_class < 1");
  int prev = 0;
  for (int b : trap_levels) {
    if (b <= prev)
      throw Error("construction: trap levels must be strictly increasing");
    if (b < 1 || b > levels)
      throw Error("construction: trap level " + std::to_string(b) +
                  " outside [1, " + std::to_string(levels) + "]");
    prev = b;
  }
  // The total Gowers weight stays below delta_base/3 and the trap weight
  // below 1/3, so every cell lands strictly under 1.
  (void)atom_count();
}

Partition BlockWeightedGraph::canonical_level(int r) const {
  return Partition::canonical(static_cast<size_t>(atoms_),
                              static_cast<size_t>(orders_.at(r)));
}

const LevelSplit& BlockWeightedGraph::split(int r, int i, int j) const {
  if (!has_level(r))
    throw Error("split: level " + std::to_string(r) + " not built (R=" +
                std::to_string(params_.levels) + ")");
  long m_prev = orders_.at(r - 1);
  return splits_.at(r - 1).at(static_cast<size_t>(i) * m_prev + j);
}

BlockWeightedGraph build_g(const ConstructionParams& params) {
  params.validate();
  BlockWeightedGraph g;
  g.params_ = params;
  g.orders_ = params.orders();
  g.atoms_ = params.atom_count();
  const long n = g.atoms_;
  g.w_.assign(static_cast<size_t>(n) * n, Rat(0));
  g.ledger_.assign(static_cast<size_t>(n) * n, {});

  for (int r = 1; r <= params.levels; ++r) {
    const long m = g.orders_[r - 1];       // clusters of P_{r-1}
    const long M = phi_of(m);              // subclasses per cluster at P_r
    const long cluster_atoms = n / m;      // atoms per P_{r-1} cluster
    const long sub_atoms = cluster_atoms / M;
    const Rat delta_r = params.level_weight(r);
    std::vector<std::vector<LevelSplit>>& all = g.splits_;
    all.emplace_back(static_cast<size_t>(m) * m);
    std::vector<LevelSplit>& level = all.back();

    // One balanced family per cluster X_i; member j splits X_i toward X_j.
    for (long i = 0; i < m; ++i) {
      Rng stream = Rng::substream(params.seed, "balanced", r, i);
      BalancedFamily fam = generate_balanced(m, stream);
      for (long j = 0; j < m; ++j) {
        LevelSplit s;
        s.a_prime = fam.a_side[j];
        s.a_atoms = VertexSet(n);
        for (long t = 0; t < M; ++t) {
          if (!s.a_prime.test(t)) continue;
          long base = i * cluster_atoms + t * sub_atoms;
          for (long a = 0; a < sub_atoms; ++a) s.a_atoms.set(base + a);
        }
        VertexSet cluster(n);
        for (long a = i * cluster_atoms; a < (i + 1) * cluster_atoms; ++a)
          cluster.set(a);
        s.b_atoms = cluster - s.a_atoms;
        level[static_cast<size_t>(i) * m + j] = std::move(s);
      }
    }

    // Add delta_r on A_{i,j} x A_{j,i} and B_{i,j} x B_{j,i}, once per
    // unordered atom pair; i = j uses the same rule within the cluster.
    if (delta_r != 0) {
      for (long i = 0; i < m; ++i)
        for (long j = i; j < m; ++j) {
          const LevelSplit& sij = level[static_cast<size_t>(i) * m + j];
          const LevelSplit& sji = level[static_cast<size_t>(j) * m + i];
          for (long u = i * cluster_atoms; u < (i + 1) * cluster_atoms; ++u) {
            bool u_in_a = sij.a_atoms.test(u);
            long v_begin = (i == j) ? u : j * cluster_atoms;
            for (long v = v_begin; v < (j + 1) * cluster_atoms; ++v) {
              bool v_in_a = sji.a_atoms.test(v);
              if (u_in_a != v_in_a) continue;
              size_t c = g.cell(u, v);
              g.w_[c] += delta_r;
              g.ledger_[c].push_back(
                  {LedgerEntry::Source::gowers, r, delta_r});
            }
          }
        }
    }
  }
  return g;
}

BlockWeightedGraph place_traps(BlockWeightedGraph g,
                               const std::vector<TrapSpec>& traps) {
  const auto& levels = g.params_.trap_levels;
  if (traps.size() > levels.size())
    throw Error("place_traps: more traps than declared trap levels");
  const long n = g.atoms_;
  for (size_t idx = 0; idx < traps.size(); ++idx) {
    const TrapSpec& spec = traps[idx];
    int g_index = static_cast<int>(idx) + 1;
    int b = spec.level >= 0 ? spec.level : levels[idx];
    if (b != levels[idx])
      throw Error("place_traps: trap " + std::to_string(g_index) +
                  " targets level " + std::to_string(b) +
                  " but the declared level is " + std::to_string(levels[idx]));
    long m_b = g.orders_.at(b);
    if (static_cast<long>(spec.graph.size()) != m_b)
      throw Error("place_traps: trap graph has " +
                  std::to_string(spec.graph.size()) + " vertices, level " +
                  std::to_string(b) + " has " + std::to_string(m_b) +
                  " clusters");
    Rat alpha = ConstructionParams::trap_weight(g_index);
    PlacedTrap placed{g_index, b, alpha, spec.graph};
    for (long u = 0; u < n; ++u) {
      int cu = g.cluster_of(u, b);
      for (long v = u; v < n; ++v) {
        int cv = g.cluster_of(v, b);
        if (cu == cv || !spec.graph[cu].test(cv)) continue;
        size_t c = g.cell(u, v);
        g.w_[c] += alpha;
        g.ledger_[c].push_back({LedgerEntry::Source::trap, g_index, alpha});
        if (g.w_[c] > 1)
          throw Error("place_traps: cell (" + std::to_string(u) + "," +
                      std::to_string(v) + ") exceeds weight 1");
      }
    }
    g.traps_.push_back(std::move(placed));
  }
  return g;
}

BlockWeightedGraph build_h(const ConstructionParams& params,
                           const TrapOverrides& trap_overrides,
                           int trap_retries) {
  BlockWeightedGraph g = build_g(params);
  std::vector<TrapSpec> traps;
  Rng rng = Rng::substream(params.seed, "traps");
  auto orders = params.orders();
  for (int b : params.trap_levels) {
    std::vector<long> coarser(orders.begin(), orders.begin() + b);
    TrapSpec t =
        generate_trap(orders[b], coarser, rng, trap_overrides, trap_retries);
    t.level = b;
    traps.push_back(std::move(t));
  }
  return place_traps(std::move(g), traps);
}

long AtomMultiset::total() const {
  long t = 0;
  for (long c : counts) t += c;
  return t;
}

AtomMultiset AtomMultiset::from_set(const VertexSet& s) {
  AtomMultiset m;
  m.counts.assign(s.size(), 0);
  for (size_t v = s.find_first(); v != VertexSet::npos; v = s.find_next(v))
    m.counts[v] = 1;
  return m;
}

Rat density(const BlockWeightedGraph& g, const AtomMultiset& A,
            const AtomMultiset& B) {
  if (static_cast<long>(A.counts.size()) != g.atoms() ||
      static_cast<long>(B.counts.size()) != g.atoms())
    throw Error("density: multiset dimension mismatch");
  long ta = A.total(), tb = B.total();
  if (ta == 0 || tb == 0) throw Error("density: empty side");
  for (long c : A.counts)
    if (c < 0 || c > g.atom_size())
      throw Error("density: per-atom count outside [0, atom_size]");
  for (long c : B.counts)
    if (c < 0 || c > g.atom_size())
      throw Error("density: per-atom count outside [0, atom_size]");
  Rat sum = 0;
  for (long u = 0; u < g.atoms(); ++u) {
    if (A.counts[u] == 0) continue;
    Rat row = 0;
    for (long v = 0; v < g.atoms(); ++v) {
      if (B.counts[v] == 0) continue;
      row += Rat(B.counts[v]) * g.weight(u, v);
    }
    sum += Rat(A.counts[u]) * row;
  }
  return sum / (Rat(ta) * Rat(tb));
}

Rat density(const BlockWeightedGraph& g, const VertexSet& A, const VertexSet& B) {
  long ta = static_cast<long>(A.count()), tb = static_cast<long>(B.count());
  if (ta == 0 || tb == 0) throw Error("density: empty side");
  Rat sum = 0;
  for (size_t u = A.find_first(); u != VertexSet::npos; u = A.find_next(u))
    for (size_t v = B.find_first(); v != VertexSet::npos; v = B.find_next(v))
      sum += g.weight(static_cast<long>(u), static_cast<long>(v));
  return sum / (Rat(ta) * Rat(tb));
}

std::vector<SourceDensity> density_breakdown(const BlockWeightedGraph& g,
                                             const VertexSet& A,
                                             const VertexSet& B) {
  long ta = static_cast<long>(A.count()), tb = static_cast<long>(B.count());
  if (ta == 0 || tb == 0) throw Error("density_breakdown: empty side");
  // Accumulate per (source, index); Gowers levels first, then traps.
  std::vector<Rat> gowers(static_cast<size_t>(g.params().levels) + 1, Rat(0));
  std::vector<Rat> trap(g.traps().size() + 1, Rat(0));
  for (size_t u = A.find_first(); u != VertexSet::npos; u = A.find_next(u))
    for (size_t v = B.find_first(); v != VertexSet::npos; v = B.find_next(v))
      for (const LedgerEntry& e :
           g.ledger(static_cast<long>(u), static_cast<long>(v))) {
        if (e.source == LedgerEntry::Source::gowers)
          gowers[e.index] += e.amount;
        else
          trap[e.index] += e.amount;
      }
  Rat denom = Rat(ta) * Rat(tb);
  std::vector<SourceDensity> out;
  for (size_t r = 1; r < gowers.size(); ++r)
    if (gowers[r] != 0 || static_cast<int>(r) <= g.params().levels)
      out.push_back({LedgerEntry::Source::gowers, static_cast<int>(r),
                     gowers[r] / denom});
  for (size_t t = 1; t < trap.size(); ++t)
    out.push_back({LedgerEntry::Source::trap, static_cast<int>(t),
                   trap[t] / denom});
  return out;
}

Rat SampledGraph::density(const VertexSet& A, const VertexSet& B) const {
  long ta = static_cast<long>(A.count()), tb = static_cast<long>(B.count());
  if (ta == 0 || tb == 0) throw Error("density: empty side");
  long e = 0;
  for (size_t u = A.find_first(); u != VertexSet::npos; u = A.find_next(u))
    e += edges_into(static_cast<long>(u), B);
  return frac(e, 1) / (Rat(ta) * Rat(tb));
}

SampledGraph sample_from_cells(long atoms,
                               const std::function<Rat(long, long)>& cell,
                               long n, uint64_t seed) {
  if (n <= 0 || n % atoms != 0)
    throw Error("sample: n = " + std::to_string(n) + " must be a positive multiple of " +
                std::to_string(atoms) + " atoms");
  SampledGraph s;
  s.n = n;
  s.atom_size = n / atoms;
  s.adj.assign(n, VertexSet(static_cast<size_t>(n)));
  const long h = s.atom_size;
  for (long cu = 0; cu < atoms; ++cu) {
    for (long cv = cu; cv < atoms; ++cv) {
      Rat p = cell(cu, cv);
      if (p < 0 || p > 1) throw Error("sample: cell weight outside [0,1]");
      if (p == 0) continue;
      // Deterministic per-cell stream; traversal order inside is canonical.
      Rng cell_rng = Rng::substream(seed, "sample-cell", cu, cv);
      bool always = (p == 1);
      long ub = cu * h, vb = cv * h;
      for (long x = 0; x < h; ++x) {
        long y0 = (cu == cv) ? x + 1 : 0;
        for (long y = y0; y < h; ++y) {
          long a = ub + x, b = vb + y;
          if (always || cell_rng.bernoulli(p)) {
            s.adj[a].set(b);
            s.adj[b].set(a);
          }
        }
      }
    }
  }
  return s;
}

SampledGraph sample_unweighted(const BlockWeightedGraph& g, long n,
                               uint64_t seed) {
  return sample_from_cells(
      g.atoms(), [&g](long u, long v) { return g.weight(u, v); }, n, seed);
}

}  // namespace regforge
