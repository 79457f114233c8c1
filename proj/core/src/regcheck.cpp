#include "regforge/regcheck.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <thread>

#include "regforge/rng.hpp"

namespace regforge {

Rat DensityView::density(const VertexSet& A, const VertexSet& B) const {
  long ta = static_cast<long>(A.count()), tb = static_cast<long>(B.count());
  if (ta == 0 || tb == 0) throw Error("density: empty side");
  Rat sum = 0;
  for (size_t u = A.find_first(); u != VertexSet::npos; u = A.find_next(u))
    sum += row_into(static_cast<long>(u), B);
  return sum / (Rat(ta) * Rat(tb));
}

DensityView view_of(const BlockWeightedGraph& g) {
  DensityView v;
  v.n = g.atoms();
  const BlockWeightedGraph* gp = &g;
  v.cell = [gp](long u, long w) -> Rat { return gp->weight(u, w); };
  v.row_into = [gp](long u, const VertexSet& B) -> Rat {
    Rat s = 0;
    for (size_t w = B.find_first(); w != VertexSet::npos; w = B.find_next(w))
      s += gp->weight(u, static_cast<long>(w));
    return s;
  };
  return v;
}

DensityView view_of(const SampledGraph& s) {
  DensityView v;
  v.n = s.n;
  const SampledGraph* sp = &s;
  v.cell = [sp](long u, long w) -> Rat {
    return Rat(sp->edge(u, w) ? 1 : 0);
  };
  v.row_into = [sp](long u, const VertexSet& B) -> Rat {
    return Rat(sp->edges_into(u, B));
  };
  return v;
}

namespace {

long size_floor(const Rat& gamma, long size) {
  Rat need = gamma * Rat(size);
  Int c = ceil_rat(need);
  long f = c.fits_slong_p() ? c.get_si() : size;
  return std::max(1L, f);
}

std::vector<long> members_of(const VertexSet& s) {
  std::vector<long> out;
  for (size_t v = s.find_first(); v != VertexSet::npos; v = s.find_next(v))
    out.push_back(static_cast<long>(v));
  return out;
}

struct BestDeviation {
  Rat dev = -1;
  VertexSet a_sub, b_sub;
  Rat d_sub;
};

// Given fixed A' (as row sums over B's members), the extreme-density B' of
// each admissible size is a sorted prefix; scan them all.
void scan_prefixes(const std::vector<Rat>& sums, const std::vector<long>& b,
                   long a_count, long floor_b, const Rat& d_pair,
                   const VertexSet& a_sub, size_t n, BestDeviation& best) {
  const long bn = static_cast<long>(b.size());
  std::vector<int> idx(bn);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&sums](int x, int y) { return sums[x] < sums[y]; });
  // Ascending prefixes give minimum densities, descending give maximums.
  for (int dir = 0; dir < 2; ++dir) {
    Rat acc = 0;
    for (long s = 1; s <= bn; ++s) {
      int pos = dir == 0 ? idx[s - 1] : idx[bn - s];
      acc += sums[pos];
      if (s < floor_b) continue;
      Rat d = acc / (Rat(a_count) * Rat(s));
      Rat dev = d - d_pair;
      if (dev < 0) dev = -dev;
      if (dev > best.dev) {
        VertexSet bs(n);
        for (long t = 1; t <= s; ++t)
          bs.set(static_cast<size_t>(b[dir == 0 ? idx[t - 1] : idx[bn - t]]));
        best = {dev, a_sub, bs, d};
      }
    }
  }
}

BestDeviation exact_scan(const DensityView& view, const std::vector<long>& a,
                         const std::vector<long>& b, long floor_a, long floor_b,
                         const Rat& d_pair) {
  const long an = static_cast<long>(a.size());
  const long bn = static_cast<long>(b.size());
  BestDeviation best;
  std::vector<Rat> sums(bn, Rat(0));  // per B-member sums over the current A'
  uint64_t prev = 0;
  const uint64_t limit = uint64_t{1} << an;
  for (uint64_t g = 1; g < limit; ++g) {
    uint64_t gray = g ^ (g >> 1);
    uint64_t diff = gray ^ prev;
    int bit = std::countr_zero(diff);
    bool added = gray & diff;
    for (long t = 0; t < bn; ++t) {
      Rat c = view.cell(a[bit], b[t]);
      if (added)
        sums[t] += c;
      else
        sums[t] -= c;
    }
    prev = gray;
    long cnt = std::popcount(gray);
    if (cnt < floor_a) continue;
    VertexSet a_sub(static_cast<size_t>(view.n));
    for (int t = 0; t < an; ++t)
      if (gray & (uint64_t{1} << t)) a_sub.set(static_cast<size_t>(a[t]));
    scan_prefixes(sums, b, cnt, floor_b, d_pair, a_sub, view.n, best);
  }
  return best;
}

// One improvement pass: fix A', rebuild the extremal B' and vice versa.
BestDeviation improve(const DensityView& view, const std::vector<long>& a,
                      const std::vector<long>& b, long floor_a, long floor_b,
                      const Rat& d_pair, VertexSet a_sub, int rounds) {
  BestDeviation best;
  const size_t n = static_cast<size_t>(view.n);
  for (int round = 0; round < rounds; ++round) {
    // B' given A'.
    std::vector<Rat> sums(b.size(), Rat(0));
    for (size_t t = 0; t < b.size(); ++t) sums[t] = view.row_into(b[t], a_sub);
    long a_count = static_cast<long>(a_sub.count());
    BestDeviation stage;
    scan_prefixes(sums, b, a_count, floor_b, d_pair, a_sub, n, stage);
    if (stage.dev > best.dev) best = stage;
    if (!stage.b_sub.size()) break;
    // A' given the new B'.
    VertexSet b_sub = stage.b_sub;
    std::vector<Rat> asums(a.size(), Rat(0));
    for (size_t t = 0; t < a.size(); ++t) asums[t] = view.row_into(a[t], b_sub);
    std::vector<int> idx(a.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&asums](int x, int y) { return asums[x] < asums[y]; });
    long b_count = static_cast<long>(b_sub.count());
    BestDeviation stage2;
    for (int dir = 0; dir < 2; ++dir) {
      Rat acc = 0;
      for (size_t s = 1; s <= a.size(); ++s) {
        int pos = dir == 0 ? idx[s - 1] : idx[a.size() - s];
        acc += asums[pos];
        if (static_cast<long>(s) < floor_a) continue;
        Rat d = acc / (Rat(static_cast<long>(s)) * Rat(b_count));
        Rat dev = d - d_pair;
        if (dev < 0) dev = -dev;
        if (dev > stage2.dev) {
          VertexSet as(n);
          for (size_t t = 1; t <= s; ++t)
            as.set(static_cast<size_t>(a[dir == 0 ? idx[t - 1] : idx[a.size() - t]]));
          stage2 = {dev, as, b_sub, d};
        }
      }
    }
    if (stage2.dev > best.dev) best = stage2;
    if (stage2.a_sub.size() && stage2.a_sub != a_sub)
      a_sub = stage2.a_sub;
    else
      break;
  }
  return best;
}

}  // namespace

RegularityVerdict check_pair(const DensityView& view, const VertexSet& A,
                             const VertexSet& B, const Rat& gamma,
                             const CheckOptions& opt) {
  if (intersection_count(A, B) != 0)
    throw Error("check_pair: sides must be disjoint");
  std::vector<long> a = members_of(A), b = members_of(B);
  if (a.empty() || b.empty()) throw Error("check_pair: empty side");
  Rat d_pair = view.density(A, B);
  long floor_a = size_floor(gamma, static_cast<long>(a.size()));
  long floor_b = size_floor(gamma, static_cast<long>(b.size()));

  RegularityVerdict out;
  out.mode = opt.mode;
  out.gamma = gamma;

  BestDeviation best;
  if (opt.mode == CheckOptions::Mode::exact) {
    // Enumerate the smaller side; the two roles are symmetric.
    bool swapped = a.size() > b.size();
    const auto& ea = swapped ? b : a;
    const auto& eb = swapped ? a : b;
    long efa = swapped ? floor_b : floor_a;
    long efb = swapped ? floor_a : floor_b;
    if (static_cast<long>(ea.size()) > opt.exact_cap)
      throw Error("check_pair: side of size " + std::to_string(ea.size()) +
                  " exceeds the exact-mode cap " + std::to_string(opt.exact_cap));
    best = exact_scan(view, ea, eb, efa, efb, d_pair);
    if (swapped && best.dev >= 0) std::swap(best.a_sub, best.b_sub);
  } else {
    best = improve(view, a, b, floor_a, floor_b, d_pair, A, 3);
    Rng rng(Rng::derive(opt.seed, "check-pair-restarts"));
    for (int r = 0; r < opt.restarts; ++r) {
      long size =
          floor_a + static_cast<long>(rng.below(
                        static_cast<uint64_t>(a.size() - floor_a + 1)));
      auto pick = rng.subset(static_cast<int>(a.size()), static_cast<int>(size));
      VertexSet start(static_cast<size_t>(view.n));
      for (int t : pick) start.set(static_cast<size_t>(a[t]));
      BestDeviation cand =
          improve(view, a, b, floor_a, floor_b, d_pair, start, 2);
      if (cand.dev > best.dev) best = cand;
    }
  }

  if (best.dev > gamma) {
    // Revalidate the witness by recomputing both densities from scratch.
    Rat d_sub = view.density(best.a_sub, best.b_sub);
    Rat dev = d_sub - d_pair;
    if (dev < 0) dev = -dev;
    if (dev != best.dev)
      throw Error("check_pair: witness failed revalidation");
    if (dev > gamma) {
      out.regular = false;
      out.witness = RegularityWitness{best.a_sub, best.b_sub, d_sub, d_pair};
    }
  }
  return out;
}

PartitionCheck check_partition(const DensityView& view, const Partition& Z,
                               const Rat& gamma, const CheckOptions& opt) {
  PartitionCheck out;
  long k = static_cast<long>(Z.order());
  out.threshold = gamma * Rat(k) * Rat(k);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) pairs.push_back({i, j});
  out.pairs = static_cast<long>(pairs.size());

  std::vector<std::optional<RegularityVerdict>> slots(pairs.size());
  auto run_range = [&](size_t begin, size_t end) {
    for (size_t t = begin; t < end; ++t) {
      auto [i, j] = pairs[t];
      CheckOptions o = opt;
      o.seed = Rng::derive(opt.seed, "pair", i, j);
      RegularityVerdict v = check_pair(view, Z.cls(i), Z.cls(j), gamma, o);
      if (!v.regular) slots[t] = std::move(v);
    }
  };
  int threads = std::max(1, opt.threads);
  if (threads == 1 || pairs.size() < 2) {
    run_range(0, pairs.size());
  } else {
    // Per-pair seeds are derived from the indices, so the fan-out cannot
    // change any verdict; the merge below is index-ordered.
    std::vector<std::thread> workers;
    size_t chunk = (pairs.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      size_t begin = t * chunk;
      size_t end = std::min(pairs.size(), begin + chunk);
      if (begin >= end) break;
      workers.emplace_back(run_range, begin, end);
    }
    for (auto& w : workers) w.join();
  }
  Rat bad = 0;
  for (size_t t = 0; t < pairs.size(); ++t)
    if (slots[t]) {
      bad += 1;
      out.irregular.push_back({pairs[t], std::move(*slots[t])});
    }
  out.regular = bad <= out.threshold;
  return out;
}

namespace {

std::vector<std::vector<int>> subclass_table(const Partition& A,
                                             const Partition& B) {
  if (!B.refines(A)) throw Error("ef-check: B does not refine A exactly");
  if (B.order() % A.order() != 0)
    throw Error("ef-check: |B| not a multiple of |A|");
  std::vector<std::vector<int>> table(A.order());
  for (size_t t = 0; t < B.order(); ++t) {
    size_t v = B.cls(t).find_first();
    table[A.class_of(v)].push_back(static_cast<int>(t));
  }
  size_t l = B.order() / A.order();
  for (const auto& row : table)
    if (row.size() != l) throw Error("ef-check: uneven refinement");
  return table;
}

}  // namespace

GoodPairCount count_good_pairs(const DensityView& view, const Partition& A,
                               const Partition& B, const Rat& eps) {
  auto table = subclass_table(A, B);
  GoodPairCount out;
  out.k = static_cast<long>(A.order());
  out.l = static_cast<long>(B.order() / A.order());
  Rat deviant_cap = eps * Rat(out.l) * Rat(out.l);
  for (int i = 0; i < out.k; ++i)
    for (int j = i + 1; j < out.k; ++j) {
      GoodPairReport rep;
      rep.i = i;
      rep.j = j;
      rep.pair_density = view.density(A.cls(i), A.cls(j));
      for (int ii = 0; ii < out.l; ++ii)
        for (int jj = 0; jj < out.l; ++jj) {
          Rat d = view.density(B.cls(table[i][ii]), B.cls(table[j][jj]));
          Rat dev = d - rep.pair_density;
          if (dev < 0) dev = -dev;
          if (dev >= eps) ++rep.deviant_count;  // ties count as deviant
        }
      rep.good = Rat(rep.deviant_count) <= deviant_cap;
      if (rep.good) ++out.good_count;
      out.reports.push_back(std::move(rep));
    }
  out.good_needed = (1 - eps) * Rat(out.k) * Rat(out.k - 1) / 2;
  out.cond2 = Rat(out.good_count) >= out.good_needed;
  return out;
}

EfReport check_ef_regular(const DensityView& view, const Partition& A,
                          const Partition& B, const Rat& eps,
                          const Rat& f_value, const CheckOptions& opt) {
  GoodPairCount counts = count_good_pairs(view, A, B, eps);
  EfReport out;
  out.k = counts.k;
  out.l = counts.l;
  out.good_count = counts.good_count;
  out.good_needed = counts.good_needed;
  out.reports = std::move(counts.reports);
  out.cond2 = counts.cond2;

  CheckOptions o1 = opt;
  o1.seed = Rng::derive(opt.seed, "ef-cond1");
  out.cond1 = check_partition(view, B, f_value, o1).regular;
  return out;
}

std::optional<BadPairWitness> bad_pair_witness(const DensityView& view,
                                               const Partition& A,
                                               const Partition& B, int i, int j,
                                               const Rat& eps) {
  auto table = subclass_table(A, B);
  const long l = static_cast<long>(B.order() / A.order());
  struct Entry {
    Rat d;
    int ii, jj;
  };
  std::vector<Entry> entries;
  for (int ii = 0; ii < l; ++ii)
    for (int jj = 0; jj < l; ++jj)
      entries.push_back(
          {view.density(B.cls(table[i][ii]), B.cls(table[j][jj])), ii, jj});
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.d < b.d; });
  Rat min_side = eps * Rat(l) * Rat(l);
  Rat need_gap = 2 * eps;
  long best_cut = -1;
  Rat best_gap = -1;
  for (long cut = 1; cut < static_cast<long>(entries.size()); ++cut) {
    Rat gap = entries[cut].d - entries[cut - 1].d;
    if (gap < need_gap) continue;
    if (Rat(cut) < min_side) continue;
    if (Rat(static_cast<long>(entries.size()) - cut) < min_side) continue;
    if (gap > best_gap) {
      best_gap = gap;
      best_cut = cut;
    }
  }
  if (best_cut < 0) return std::nullopt;
  BadPairWitness w;
  w.gap = best_gap;
  for (long t = 0; t < static_cast<long>(entries.size()); ++t)
    (t >= best_cut ? w.c1 : w.c2).push_back({entries[t].ii, entries[t].jj});
  return w;
}

namespace {

void json_set(std::ostringstream& os, const VertexSet& s) {
  os << '[';
  bool first = true;
  for (size_t v = s.find_first(); v != VertexSet::npos; v = s.find_next(v)) {
    os << (first ? "" : ",") << v;
    first = false;
  }
  os << ']';
}

}  // namespace

std::string RegularityVerdict::to_json() const {
  std::ostringstream os;
  os << "{\"regular\":" << (regular ? "true" : "false") << ",\"mode\":\""
     << (mode == CheckOptions::Mode::exact ? "exact" : "heuristic")
     << "\",\"gamma\":\"" << rat_str(gamma) << "\"";
  if (witness) {
    os << ",\"witness\":{\"a_sub\":";
    json_set(os, witness->a_sub);
    os << ",\"b_sub\":";
    json_set(os, witness->b_sub);
    os << ",\"d_sub\":\"" << rat_str(witness->d_sub) << "\",\"d_pair\":\""
       << rat_str(witness->d_pair) << "\"}";
  }
  os << "}";
  return os.str();
}

}  // namespace regforge
