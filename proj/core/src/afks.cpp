#include "regforge/afks.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "regforge/rng.hpp"

namespace regforge {

Rat potential(const DensityView& view, const Partition& Z) {
  Rat n2 = Rat(view.n) * Rat(view.n);
  Rat q = 0;
  for (size_t i = 0; i < Z.order(); ++i)
    for (size_t j = 0; j < Z.order(); ++j) {
      Rat d = view.density(Z.cls(i), Z.cls(j));
      Rat w = Rat(static_cast<long>(Z.cls(i).count())) *
              Rat(static_cast<long>(Z.cls(j).count()));
      q += d * d * w;
    }
  return q / n2;
}

namespace {

// Split every class by the Venn atoms of the pool sets; group order is the
// class index then the pool-membership mask.
std::vector<VertexSet> venn_split(const Partition& cur,
                                  const std::vector<VertexSet>& pool) {
  std::vector<VertexSet> out;
  for (size_t c = 0; c < cur.order(); ++c) {
    std::map<uint64_t, VertexSet> groups;
    const VertexSet& cls = cur.cls(c);
    for (size_t v = cls.find_first(); v != VertexSet::npos;
         v = cls.find_next(v)) {
      uint64_t mask = 0;
      for (size_t p = 0; p < pool.size(); ++p)
        if (pool[p].test(v)) mask |= (uint64_t{1} << p);
      auto [it, fresh] = groups.try_emplace(mask, VertexSet(cls.size()));
      it->second.set(v);
    }
    for (auto& [mask, set] : groups) out.push_back(std::move(set));
  }
  return out;
}

long gcd_sizes(const std::vector<VertexSet>& classes) {
  long g = 0;
  for (const VertexSet& c : classes)
    g = std::gcd(g, static_cast<long>(c.count()));
  return g;
}

long smallest_divisor_at_least(long n, long k) {
  for (long d = k; d <= n; ++d)
    if (n % d == 0) return d;
  return n;
}

struct Rebalanced {
  Partition partition;
  Rat exchanged;  // fraction of vertices in mixed chunks
};

// Equal-size classes out of the Venn pieces. When the gcd of the piece sizes
// gives an acceptable order the result is a pure refinement (fraction 0);
// otherwise pieces are chopped into q-chunks in order, mixing remainders.
Rebalanced rebalance(long n, const std::vector<VertexSet>& pieces,
                     long min_order, long max_order) {
  long g = gcd_sizes(pieces);
  if (g > 0 && n / g <= max_order) {
    std::vector<VertexSet> classes;
    for (const VertexSet& p : pieces) {
      VertexSet chunk(static_cast<size_t>(n));
      long filled = 0;
      for (size_t v = p.find_first(); v != VertexSet::npos; v = p.find_next(v)) {
        chunk.set(v);
        if (++filled == g) {
          classes.push_back(chunk);
          chunk.reset();
          filled = 0;
        }
      }
    }
    return {Partition::from_classes(static_cast<size_t>(n), std::move(classes)),
            Rat(0)};
  }
  long k_target = smallest_divisor_at_least(
      n, std::max(min_order, std::min(static_cast<long>(pieces.size()), max_order)));
  long q = n / k_target;
  std::vector<VertexSet> classes;
  VertexSet chunk(static_cast<size_t>(n));
  long filled = 0;
  std::vector<long> piece_of(n, -1);
  for (size_t p = 0; p < pieces.size(); ++p)
    for (size_t v = pieces[p].find_first(); v != VertexSet::npos;
         v = pieces[p].find_next(v))
      piece_of[v] = static_cast<long>(p);
  std::vector<long> members;
  members.reserve(n);
  for (size_t p = 0; p < pieces.size(); ++p)
    for (size_t v = pieces[p].find_first(); v != VertexSet::npos;
         v = pieces[p].find_next(v))
      members.push_back(static_cast<long>(v));
  long exchanged = 0;
  std::map<long, long> tally;
  for (long idx = 0; idx < n; ++idx) {
    long v = members[idx];
    chunk.set(static_cast<size_t>(v));
    ++tally[piece_of[v]];
    if (++filled == q) {
      long majority = 0;
      for (auto& [piece, cnt] : tally) majority = std::max(majority, cnt);
      exchanged += q - majority;
      classes.push_back(chunk);
      chunk.reset();
      tally.clear();
      filled = 0;
    }
  }
  return {Partition::from_classes(static_cast<size_t>(n), std::move(classes)),
          frac(exchanged, n)};
}

}  // namespace

RefineResult szemeredi_refine(const DensityView& view, const Partition& start,
                              const Rat& gamma, const RefineOptions& opt) {
  RefineResult out;
  out.partition = start;
  out.exchanged_total = 0;
  for (int pass = 0; pass < opt.max_passes; ++pass) {
    CheckOptions co = opt.check;
    co.seed = Rng::derive(opt.check.seed, "refine-pass", pass);
    PartitionCheck pc = check_partition(view, out.partition, gamma, co);
    RefinePass rec;
    rec.order_before = static_cast<long>(out.partition.order());
    rec.potential_before = potential(view, out.partition);
    rec.irregular_found = static_cast<long>(pc.irregular.size());
    if (pc.regular) {
      out.regular_claimed = true;
      rec.order_after = rec.order_before;
      rec.potential_after = rec.potential_before;
      rec.exchanged_fraction = 0;
      out.passes.push_back(std::move(rec));
      return out;
    }
    // Fold in the widest witnesses.
    std::vector<std::pair<Rat, const RegularityVerdict*>> ranked;
    for (const auto& [pair, verdict] : pc.irregular) {
      Rat dev = verdict.witness->d_sub - verdict.witness->d_pair;
      if (dev < 0) dev = -dev;
      ranked.push_back({dev, &verdict});
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<VertexSet> pool;
    for (int t = 0; t < std::min<int>(opt.witness_cap, ranked.size()); ++t) {
      pool.push_back(ranked[t].second->witness->a_sub);
      pool.push_back(ranked[t].second->witness->b_sub);
    }
    auto pieces = venn_split(out.partition, pool);
    Rebalanced rb = rebalance(view.n, pieces,
                              static_cast<long>(out.partition.order()),
                              opt.max_order);
    rec.order_after = static_cast<long>(rb.partition.order());
    rec.potential_after = potential(view, rb.partition);
    rec.exchanged_fraction = rb.exchanged;
    out.exchanged_total += rb.exchanged;
    bool stalled = rb.partition.order() == out.partition.order() &&
                   rec.potential_after == rec.potential_before;
    out.partition = std::move(rb.partition);
    out.passes.push_back(std::move(rec));
    if (stalled) break;  // no progress possible with these witnesses
  }
  return out;
}

namespace {

// Largest dyadic t/2^12 not exceeding eps^{1/5}; exact fifth root on integers.
Rat fifth_root_lower(const Rat& eps) {
  const long scale_bits = 12;
  Int num = eps.get_num() << (5 * scale_bits);
  Int scaled = num / eps.get_den();
  Int root;
  mpz_root(root.get_mpz_t(), scaled.get_mpz_t(), 5);
  Rat r(root, Int(1) << scale_bits);
  r.canonicalize();
  return r;
}

}  // namespace

IterationTrace afks_iterate(const DensityView& view,
                            const BlockWeightedGraph* traps_from,
                            const Rat& eps, const AfksOptions& opt) {
  if (eps <= 0 || eps >= 1) throw Error("afks: eps must lie in (0,1)");
  Int k1_int = ceil_rat(1 / eps);
  long k1 = k1_int.get_si();
  if (view.n % k1 != 0)
    throw Error("afks: initial order ceil(1/eps) = " + std::to_string(k1) +
                " must divide the universe size " + std::to_string(view.n));
  Rat beta_check = std::min(fifth_root_lower(eps), opt.beta_cap);

  IterationTrace trace;
  Partition A = Partition::canonical(static_cast<size_t>(view.n),
                                     static_cast<size_t>(k1));
  for (int step = 0; step < opt.budget; ++step) {
    Rat gamma_i = opt.f(static_cast<long>(A.order()));
    RefineOptions ro = opt.refine;
    ro.check.seed = Rng::derive(opt.refine.check.seed, "afks-step", step);
    RefineResult rr = szemeredi_refine(view, A, gamma_i, ro);
    const Partition& B = rr.partition;

    IterationStep row;
    row.k = static_cast<long>(A.order());
    row.l = static_cast<long>(B.order() / A.order());
    row.cond1 = rr.regular_claimed;
    GoodPairCount gp = count_good_pairs(view, A, B, eps);
    row.cond2 = gp.cond2;
    long pairs = row.k * (row.k - 1) / 2;
    row.good_fraction = pairs > 0 ? frac(gp.good_count, pairs) : Rat(1);
    row.potential_value = potential(view, B);
    row.irregular_found =
        rr.passes.empty() ? 0 : rr.passes.front().irregular_found;
    row.refine_passes = rr.passes;

    if (traps_from) {
      for (const PlacedTrap& t : traps_from->traps()) {
        TrapMark mark;
        mark.trap_g = t.g;
        mark.level = t.level;
        mark.beta_used = beta_check;
        long m_b = traps_from->order_at_level(t.level);
        mark.order_hypothesis = row.k * row.k <= m_b;
        bool finer_than_a = m_b > row.k;
        bool b_refines =
            beta_refines(B, traps_from->canonical_level(t.level), beta_check)
                .refines;
        mark.strictly_between = finer_than_a && b_refines;
        row.traps.push_back(mark);
      }
    }
    trace.steps.push_back(std::move(row));
    if (rr.regular_claimed && gp.cond2) {
      trace.stop_reason = "regular";
      return trace;
    }
    A = B;
  }
  trace.stop_reason = "budget";
  return trace;
}

std::string IterationTrace::to_csv() const {
  std::ostringstream os;
  os << "step,k,l,cond1,cond2,good_fraction,potential,irregular_found,"
        "straddled_traps\n";
  for (size_t i = 0; i < steps.size(); ++i) {
    const IterationStep& s = steps[i];
    os << (i + 1) << ',' << s.k << ',' << s.l << ',' << (s.cond1 ? 1 : 0) << ','
       << (s.cond2 ? 1 : 0) << ',' << rat_str(s.good_fraction) << ','
       << rat_str(s.potential_value) << ',' << s.irregular_found << ',';
    bool first = true;
    for (const TrapMark& t : s.traps)
      if (t.strictly_between) {
        os << (first ? "" : ";") << t.trap_g;
        first = false;
      }
    os << '\n';
  }
  return os.str();
}

std::string IterationTrace::to_json() const {
  std::ostringstream os;
  os << "{\"stop_reason\":\"" << stop_reason << "\",\"steps\":[";
  for (size_t i = 0; i < steps.size(); ++i) {
    const IterationStep& s = steps[i];
    os << (i ? "," : "") << "{\"step\":" << (i + 1) << ",\"k\":" << s.k
       << ",\"l\":" << s.l << ",\"cond1\":" << (s.cond1 ? "true" : "false")
       << ",\"cond2\":" << (s.cond2 ? "true" : "false")
       << ",\"good_fraction\":\"" << rat_str(s.good_fraction)
       << "\",\"potential\":\"" << rat_str(s.potential_value)
       << "\",\"irregular_found\":" << s.irregular_found << ",\"traps\":[";
    for (size_t t = 0; t < s.traps.size(); ++t) {
      const TrapMark& m = s.traps[t];
      os << (t ? "," : "") << "{\"g\":" << m.trap_g << ",\"level\":" << m.level
         << ",\"strictly_between\":" << (m.strictly_between ? "true" : "false")
         << ",\"order_hypothesis\":" << (m.order_hypothesis ? "true" : "false")
         << ",\"beta\":\"" << rat_str(m.beta_used) << "\"}";
    }
    os << "]}";
  }
  os << "]}";
  return os.str();
}

}  // namespace regforge
