#include "regforge/convexdecomp.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

namespace regforge {

ConvexDecomposition decompose(const std::vector<Rat>& x, int k) {
  const size_t n = x.size();
  if (k < 1) throw Error("decompose: k must be positive");
  if (static_cast<size_t>(k) > n)
    throw Error("decompose: k=" + std::to_string(k) + " exceeds dimension " +
                std::to_string(n));
  Rat cap = frac(1, k);
  Rat sum = 0;
  for (size_t i = 0; i < n; ++i) {
    if (x[i] < 0 || x[i] > cap)
      throw Error("decompose: coordinate " + std::to_string(i) + " = " +
                  rat_str(x[i]) + " outside [0, 1/" + std::to_string(k) + "]");
    sum += x[i];
  }
  if (sum != 1)
    throw Error("decompose: coordinates sum to " + rat_str(sum) + ", not 1");

  std::vector<Rat> y(n);
  for (size_t i = 0; i < n; ++i) y[i] = Rat(k) * x[i];
  Rat w = 1;

  ConvexDecomposition out;
  out.k = k;
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const size_t step_cap = 2 * n + 2;

  while (w > 0) {
    if (out.terms.size() > step_cap)
      throw Error("decompose: greedy peel failed to terminate");
    // S = k largest entries of y; ties resolved toward the lowest index, so
    // entries equal to w (the maximum possible) always land inside S.
    std::sort(idx.begin(), idx.end(), [&y](int a, int b) {
      int c = cmp(y[a], y[b]);
      return c != 0 ? c > 0 : a < b;
    });
    std::vector<int> S(idx.begin(), idx.begin() + k);

    Rat a = w;
    for (int i : S) a = std::min(a, y[i]);
    if (static_cast<size_t>(k) < n) {
      Rat max_out = y[idx[k]];
      for (size_t t = k + 1; t < n; ++t) max_out = std::max(max_out, y[idx[t]]);
      Rat slack = w - max_out;
      a = std::min(a, slack);
    }
    if (a <= 0) throw Error("decompose: stalled greedy step");

    for (int i : S) y[i] -= a;
    w -= a;
    std::sort(S.begin(), S.end());
    out.terms.push_back({a, std::move(S)});
  }
  return out;
}

std::vector<Rat> reconstruct(const ConvexDecomposition& d, size_t n) {
  std::vector<Rat> x(n, Rat(0));
  Rat unit = frac(1, d.k);
  for (const ConvexTerm& t : d.terms)
    for (int i : t.support) x[static_cast<size_t>(i)] += t.coef * unit;
  return x;
}

AdjMatrix random_graph_half(long m, Rng& rng) {
  AdjMatrix q(m, VertexSet(m));
  for (long u = 0; u < m; ++u)
    for (long v = u + 1; v < m; ++v)
      if (rng.coin()) {
        q[u].set(v);
        q[v].set(u);
      }
  return q;
}

long count_edges(const AdjMatrix& q) {
  long total = 0;
  for (const auto& row : q) total += static_cast<long>(row.count());
  return total / 2;
}

long pair_edge_count(const AdjMatrix& q, const VertexSet& R, const VertexSet& Rp) {
  long e = 0;
  for (size_t u = R.find_first(); u != VertexSet::npos; u = R.find_next(u))
    e += static_cast<long>(intersection_count(q[u], Rp));
  return e;
}

long cond1_set_size(long m) {
  long s = 1;
  while (16 * s * s < m) ++s;
  return s;
}

namespace {

Int binom(long n, long k) {
  if (k < 0 || k > n) return 0;
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n),
               static_cast<unsigned long>(k));
  return r;
}

// Lexicographic combination enumeration.
bool next_combination(std::vector<int>& c, long n) {
  int k = static_cast<int>(c.size());
  for (int i = k - 1; i >= 0; --i) {
    if (c[i] < n - (k - i)) {
      ++c[i];
      for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

VertexSet to_set(long m, const std::vector<int>& idx, long base = 0) {
  VertexSet s(m);
  for (int v : idx) s.set(static_cast<size_t>(base + v));
  return s;
}

struct DeviationCheck {
  Rat deviation, bound, ratio;
  bool ok;
};

DeviationCheck check_pair_deviation(long e, long r, long rp, const Rat& factor) {
  Rat prod = Rat(r) * Rat(rp);
  Rat dev = Rat(e) - prod / 2;
  if (dev < 0) dev = -dev;
  Rat bound = factor * prod;
  Rat ratio = dev / prod;
  ratio.canonicalize();
  return {dev, bound, ratio, dev <= bound};
}

// Word-sized bound factor for the enumeration hot loops. Deviations are
// compared as 2*dev = |2e - r*rp| against 2*(num/den)*r*rp in 128-bit.
struct FastFactor {
  long long num, den;
  explicit FastFactor(const Rat& f) {
    Rat c = f;
    c.canonicalize();
    if (!c.get_num().fits_slong_p() || !c.get_den().fits_slong_p())
      throw Error("trap bound factor too large for the enumeration path");
    num = c.get_num().get_si();
    den = c.get_den().get_si();
  }
  bool ok(long e, long r, long rp) const {
    __int128 d2 = 2 * (__int128)e - (__int128)r * rp;
    if (d2 < 0) d2 = -d2;
    return (__int128)den * d2 <= 2 * (__int128)num * r * rp;
  }
};

// dev/(r*rp) as the pair (|2e - r*rp|, 2*r*rp), compared by cross products.
struct FastRatio {
  long long num = 0, den = 1;
  static FastRatio of(long e, long r, long rp) {
    long long d2 = 2 * e - (long long)r * rp;
    if (d2 < 0) d2 = -d2;
    return {d2, 2 * (long long)r * rp};
  }
  bool operator>(const FastRatio& o) const {
    return (__int128)num * o.den > (__int128)o.num * den;
  }
};

}  // namespace

TrapVerification verify_trap(const AdjMatrix& q,
                             const std::vector<long>& coarser_orders,
                             const TrapOverrides& ov) {
  const long m = static_cast<long>(q.size());
  TrapVerification out;
  out.params = ov;
  out.worst_ratio1 = 0;

  // Word-sized rows make the exhaustive sweeps cheap for desk-scale m.
  const bool fast = m <= 64;
  std::vector<uint64_t> row64;
  if (fast) {
    row64.assign(m, 0);
    for (long u = 0; u < m; ++u)
      for (size_t v = q[u].find_first(); v != VertexSet::npos; v = q[u].find_next(v))
        row64[u] |= (uint64_t{1} << v);
  }
  auto edges_masked = [&](const std::vector<int>& ri, uint64_t maskRp) {
    long e = 0;
    for (int u : ri) e += std::popcount(row64[u] & maskRp);
    return e;
  };
  auto edges_set = [&](const std::vector<int>& ri, const VertexSet& Rp) {
    long e = 0;
    for (int u : ri) e += static_cast<long>(intersection_count(q[u], Rp));
    return e;
  };
  auto mask_of = [](const std::vector<int>& idx, long base = 0) {
    uint64_t msk = 0;
    for (int v : idx) msk |= (uint64_t{1} << (base + v));
    return msk;
  };

  if (ov.check_cond1) {
    const long s = cond1_set_size(m);
    Rat factor1 = frac(1, 4) + ov.cond1_slack;
    FastFactor ff1(factor1);
    FastRatio worst1_ratio;
    bool have_worst1 = false;
    Int total = binom(m, s) * (binom(m, s) + 1) / 2;
    out.exhaustive1 = total <= Int(static_cast<long>(ov.budget));
    auto consider = [&](long e, const std::vector<int>& ri,
                        const std::vector<int>& rpi) {
      ++out.cases1;
      FastRatio ratio = FastRatio::of(e, s, s);
      if (!have_worst1 || ratio > worst1_ratio) {
        worst1_ratio = ratio;
        have_worst1 = true;
        auto c = check_pair_deviation(e, s, s, factor1);
        out.worst_ratio1 = c.ratio;
        out.worst1 = TrapWorstCase{ri, rpi, e, c.deviation, c.bound};
      }
      if (!ff1.ok(e, s, s)) out.cond1_pass = false;
    };
    if (out.exhaustive1) {
      // All unordered pairs of s-subsets, including R = R'.
      std::vector<int> ri(s);
      std::iota(ri.begin(), ri.end(), 0);
      std::vector<std::vector<int>> subsets;
      do {
        subsets.push_back(ri);
      } while (next_combination(ri, m));
      if (fast) {
        std::vector<uint64_t> masks;
        masks.reserve(subsets.size());
        for (auto& c : subsets) masks.push_back(mask_of(c));
        for (size_t a = 0; a < subsets.size(); ++a)
          for (size_t b = a; b < subsets.size(); ++b)
            consider(edges_masked(subsets[a], masks[b]), subsets[a], subsets[b]);
      } else {
        std::vector<VertexSet> sets;
        sets.reserve(subsets.size());
        for (auto& c : subsets) sets.push_back(to_set(m, c));
        for (size_t a = 0; a < subsets.size(); ++a)
          for (size_t b = a; b < subsets.size(); ++b)
            consider(edges_set(subsets[a], sets[b]), subsets[a], subsets[b]);
      }
    } else {
      Rng rng(Rng::derive(ov.seed, "trap-cond1-sample"));
      for (long t = 0; t < ov.sampled_trials; ++t) {
        auto ri = rng.subset(static_cast<int>(m), static_cast<int>(s));
        auto rpi = rng.subset(static_cast<int>(m), static_cast<int>(s));
        std::sort(ri.begin(), ri.end());
        std::sort(rpi.begin(), rpi.end());
        long e = fast ? edges_masked(ri, mask_of(rpi))
                      : edges_set(ri, to_set(m, rpi));
        consider(e, ri, rpi);
      }
    }
  }

  if (ov.check_cond2) {
    int k_max = ov.k_max > 0 ? ov.k_max : static_cast<int>(floor_log2(Int(m)));
    // Enumerate the feasible (order, i, j, k) combos first.
    struct Combo {
      long order, h;
      int i, j, k;
      long rsize, rpsize;
    };
    std::vector<Combo> combos;
    Int total = 0;
    for (long mp : coarser_orders) {
      if (mp >= m) continue;
      if (mp <= 0 || m % mp != 0)
        throw Error("verify_trap: coarser order " + std::to_string(mp) +
                    " does not divide m_b=" + std::to_string(m));
      long h = m / mp;
      for (int k = ov.k_min; k <= k_max; ++k) {
        long rsize = 1;
        bool overflow = false;
        for (int t = 0; t < ov.size_exponent; ++t) {
          rsize *= k;
          if (rsize > h) {
            overflow = true;
            break;
          }
        }
        if (overflow || rsize > h) continue;
        long rpsize = (h + k - 1) / k;
        if (rpsize > h) continue;
        for (int i = 0; i < mp; ++i)
          for (int j = 0; j < mp; ++j) {
            combos.push_back({mp, h, i, j, k, rsize, rpsize});
            total += binom(h, rsize) * binom(h, rpsize);
          }
      }
    }
    out.exhaustive2 = total <= Int(static_cast<long>(ov.budget));
    std::map<int, FastFactor> factors;
    std::map<int, Rat> factor_rats;
    std::map<int, FastRatio> worst_by_k;
    for (const Combo& cb : combos)
      if (!factors.count(cb.k)) {
        Rat f = frac(1, cb.k) * frac(1, cb.k) + ov.cond2_slack;
        factors.emplace(cb.k, FastFactor(f));
        factor_rats.emplace(cb.k, f);
      }
    FastRatio worst2_ratio;
    bool have_worst2 = false;
    auto consider = [&](const Combo& cb, const std::vector<int>& ri,
                        const std::vector<int>& rpi) {
      long e;
      if (fast) {
        uint64_t maskRp = mask_of(rpi, cb.j * cb.h);
        e = 0;
        for (int u : ri) e += std::popcount(row64[cb.i * cb.h + u] & maskRp);
      } else {
        VertexSet R = to_set(m, ri, cb.i * cb.h);
        VertexSet Rp = to_set(m, rpi, cb.j * cb.h);
        e = pair_edge_count(q, R, Rp);
      }
      ++out.cases2;
      FastRatio ratio = FastRatio::of(e, cb.rsize, cb.rpsize);
      auto it = worst_by_k.find(cb.k);
      if (it == worst_by_k.end() || ratio > it->second) {
        worst_by_k[cb.k] = ratio;
        auto c = check_pair_deviation(e, cb.rsize, cb.rpsize, factor_rats.at(cb.k));
        out.worst_ratio2[cb.k] = c.ratio;
      }
      if (!have_worst2 || ratio > worst2_ratio) {
        worst2_ratio = ratio;
        have_worst2 = true;
        auto c = check_pair_deviation(e, cb.rsize, cb.rpsize, factor_rats.at(cb.k));
        TrapWorstCase w;
        w.R = ri;
        w.Rp = rpi;
        for (int& v : w.R) v += static_cast<int>(cb.i * cb.h);
        for (int& v : w.Rp) v += static_cast<int>(cb.j * cb.h);
        w.e = e;
        w.deviation = c.deviation;
        w.bound = c.bound;
        w.coarse_order = cb.order;
        w.i = cb.i;
        w.j = cb.j;
        w.k = cb.k;
        out.worst2 = std::move(w);
      }
      if (!factors.at(cb.k).ok(e, cb.rsize, cb.rpsize)) out.cond2_pass = false;
    };
    if (out.exhaustive2) {
      for (const Combo& cb : combos) {
        std::vector<int> ri(cb.rsize);
        std::iota(ri.begin(), ri.end(), 0);
        do {
          std::vector<int> rpi(cb.rpsize);
          std::iota(rpi.begin(), rpi.end(), 0);
          do {
            consider(cb, ri, rpi);
          } while (next_combination(rpi, cb.h));
        } while (next_combination(ri, cb.h));
      }
    } else if (!combos.empty()) {
      Rng rng(Rng::derive(ov.seed, "trap-cond2-sample"));
      for (long t = 0; t < ov.sampled_trials; ++t) {
        const Combo& cb = combos[rng.below(combos.size())];
        auto ri = rng.subset(static_cast<int>(cb.h), static_cast<int>(cb.rsize));
        auto rpi = rng.subset(static_cast<int>(cb.h), static_cast<int>(cb.rpsize));
        std::sort(ri.begin(), ri.end());
        std::sort(rpi.begin(), rpi.end());
        consider(cb, ri, rpi);
      }
    }
  }
  return out;
}

TrapSpec generate_trap(long m_b, const std::vector<long>& coarser_orders,
                       Rng& rng, const TrapOverrides& ov, int retries) {
  if (m_b < 4) throw Error("generate_trap: need m_b >= 4");
  std::optional<TrapVerification> best;
  for (int attempt = 0; attempt < retries; ++attempt) {
    AdjMatrix q = random_graph_half(m_b, rng);
    TrapVerification v = verify_trap(q, coarser_orders, ov);
    if (v.pass()) {
      TrapSpec spec;
      spec.graph = std::move(q);
      spec.verification = std::move(v);
      return spec;
    }
    if (!best || (v.cond1_pass && !best->cond1_pass) ||
        (v.cond1_pass == best->cond1_pass && v.worst_ratio1 < best->worst_ratio1))
      best = std::move(v);
  }
  std::ostringstream os;
  os << "generate_trap: retry budget (" << retries << ") exhausted at m_b=" << m_b
     << "; best attempt: cond1=" << (best->cond1_pass ? "pass" : "fail")
     << " cond2=" << (best->cond2_pass ? "pass" : "fail")
     << " worst cond1 deviation ratio " << rat_str(best->worst_ratio1);
  throw Error(os.str());
}

QuadformReport quadform_bounds(const AdjMatrix& q, const std::vector<Rat>& x,
                               const std::vector<Rat>& y, const Rat& bound_factor) {
  const size_t m = q.size();
  if (x.size() != m || y.size() != m)
    throw Error("quadform_bounds: dimension mismatch");
  QuadformReport r;
  r.bound_factor = bound_factor;
  for (size_t u = 0; u < m; ++u) {
    if (x[u] < 0 || x[u] > 1 || y[u] < 0 || y[u] > 1)
      throw Error("quadform_bounds: entries must lie in [0,1]");
    r.g1 += x[u];
    r.g2 += y[u];
  }
  r.value = 0;
  for (size_t u = 0; u < m; ++u) {
    if (x[u] == 0) continue;
    for (size_t v = q[u].find_first(); v != VertexSet::npos; v = q[u].find_next(v))
      r.value += x[u] * y[v];
  }
  r.deviation = r.value - r.g1 * r.g2 / 2;
  if (r.deviation < 0) r.deviation = -r.deviation;
  r.holds = r.deviation <= bound_factor * r.g1 * r.g2;
  if (r.g1 != r.g2) {
    r.reason = "sum x != sum y";
    return r;
  }
  // g >= sqrt(m)/2, exactly: 4 g^2 >= m.
  if (4 * r.g1 * r.g1 < Rat(static_cast<long>(m))) {
    r.reason = "mass below sqrt(m)/2";
    return r;
  }
  r.applicable = true;
  return r;
}

QuadformReport quadform_bounds(const AdjMatrix& q, const std::vector<Rat>& x,
                               const std::vector<Rat>& y, const Lem3Context& ctx) {
  const size_t m = q.size();
  if (x.size() != m || y.size() != m)
    throw Error("quadform_bounds: dimension mismatch");
  QuadformReport r;
  r.bound_factor = ctx.bound_factor;
  for (size_t u = 0; u < m; ++u) {
    r.g1 += x[u];
    r.g2 += y[u];
  }
  r.value = 0;
  for (size_t u = 0; u < m; ++u) {
    if (x[u] == 0) continue;
    for (size_t v = q[u].find_first(); v != VertexSet::npos; v = q[u].find_next(v))
      r.value += x[u] * y[v];
  }
  r.deviation = r.value - r.g1 * r.g2 / 2;
  if (r.deviation < 0) r.deviation = -r.deviation;
  r.holds = r.deviation <= ctx.bound_factor * r.g1 * r.g2;

  Rat delta_lo = ctx.delta_lo;
  if (delta_lo == 0) delta_lo = frac(1, floor_log2(Int(static_cast<long>(m))));
  if (!(delta_lo < ctx.delta && ctx.delta < ctx.delta_hi)) {
    r.reason = "delta outside (" + rat_str(delta_lo) + ", " + rat_str(ctx.delta_hi) + ")";
    return r;
  }
  if (ctx.xi_support.count() != ctx.xj_support.count()) {
    r.reason = "cluster supports differ in size";
    return r;
  }
  Rat cap = rat_pow(ctx.delta, ctx.cap_exponent);
  for (size_t u = 0; u < m; ++u) {
    if (x[u] != 0 && !ctx.xi_support.test(u)) {
      r.reason = "x supported outside X_i";
      return r;
    }
    if (y[u] != 0 && !ctx.xj_support.test(u)) {
      r.reason = "y supported outside X_j";
      return r;
    }
    if (x[u] < 0 || x[u] > 1 || y[u] < 0 || y[u] > 1) {
      r.reason = "entries outside [0,1]";
      return r;
    }
  }
  if (r.g1 <= 0) {
    r.reason = "x has no mass";
    return r;
  }
  for (size_t u = 0; u < m; ++u)
    if (x[u] != 0 && !(x[u] / r.g1 < cap)) {
      r.reason = "coordinate " + std::to_string(u) + " holds a delta^" +
                 std::to_string(ctx.cap_exponent) + " fraction of x";
      return r;
    }
  Rat h(static_cast<long>(ctx.xj_support.count()));
  if (!(r.g2 > 2 * ctx.delta * h)) {
    r.reason = "sum y not above 2*delta*h";
    return r;
  }
  r.applicable = true;
  return r;
}

namespace {

void json_ints(std::ostringstream& os, const std::vector<int>& v) {
  os << '[';
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
}

void json_worst(std::ostringstream& os, const TrapWorstCase& w) {
  os << "{\"R\":";
  json_ints(os, w.R);
  os << ",\"Rp\":";
  json_ints(os, w.Rp);
  os << ",\"e\":" << w.e << ",\"deviation\":\"" << rat_str(w.deviation)
     << "\",\"bound\":\"" << rat_str(w.bound) << "\"";
  if (w.coarse_order >= 0)
    os << ",\"coarse_order\":" << w.coarse_order << ",\"i\":" << w.i
       << ",\"j\":" << w.j << ",\"k\":" << w.k;
  os << "}";
}

}  // namespace

std::string TrapVerification::to_json() const {
  std::ostringstream os;
  os << "{\"cond1\":{\"pass\":" << (cond1_pass ? "true" : "false")
     << ",\"exhaustive\":" << (exhaustive1 ? "true" : "false")
     << ",\"cases\":" << cases1 << ",\"worst_ratio\":\"" << rat_str(worst_ratio1)
     << "\"";
  if (worst1) {
    os << ",\"worst\":";
    json_worst(os, *worst1);
  }
  os << "},\"cond2\":{\"pass\":" << (cond2_pass ? "true" : "false")
     << ",\"exhaustive\":" << (exhaustive2 ? "true" : "false")
     << ",\"cases\":" << cases2;
  if (worst2) {
    os << ",\"worst\":";
    json_worst(os, *worst2);
  }
  os << ",\"worst_ratio_by_k\":{";
  bool first = true;
  for (const auto& [k, ratio] : worst_ratio2) {
    os << (first ? "" : ",") << "\"" << k << "\":\"" << rat_str(ratio) << "\"";
    first = false;
  }
  os << "}},\"params\":{\"cond1_slack\":\"" << rat_str(params.cond1_slack)
     << "\",\"cond2_slack\":\"" << rat_str(params.cond2_slack)
     << "\",\"k_min\":" << params.k_min << ",\"k_max\":" << params.k_max
     << ",\"size_exponent\":" << params.size_exponent
     << ",\"budget\":" << params.budget
     << ",\"sampled_trials\":" << params.sampled_trials
     << ",\"seed\":" << params.seed << "}}";
  return os.str();
}

}  // namespace regforge
