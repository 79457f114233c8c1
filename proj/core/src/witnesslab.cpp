#include "regforge/witnesslab.hpp"

#include <sstream>

namespace regforge {

UsefulReport classify_useful(const Partition& A, const Partition& B,
                             const Partition& Pb, const Rat& beta,
                             const Rat& threshold) {
  if (!B.refines(A)) throw Error("classify_useful: B must refine A");
  UsefulReport out;
  out.fine_useful.assign(B.order(), false);
  out.useless_count.assign(A.order(), 0);
  out.coarse_useful.assign(A.order(), true);
  long l = static_cast<long>(B.order() / A.order());
  for (size_t t = 0; t < B.order(); ++t) {
    bool useful = beta_container(B.cls(t), Pb, beta).has_value();
    out.fine_useful[t] = useful;
    if (!useful) {
      size_t v = B.cls(t).find_first();
      ++out.useless_count[A.class_of(v)];
    }
  }
  for (size_t i = 0; i < A.order(); ++i)
    out.coarse_useful[i] = Rat(out.useless_count[i]) < threshold * Rat(l);
  return out;
}

std::vector<HelpfulPairCert> helpful_pairs(const BlockWeightedGraph& g,
                                           const Partition& Z, int level,
                                           const Rat& beta) {
  if (beta <= 0 || beta >= frac(1, 2))
    throw Error("helpful_pairs: beta must lie in (0, 1/2)");
  if (!g.has_level(level))
    throw Error("helpful_pairs: construction has no splits for level " +
                std::to_string(level));
  Partition coarse = g.canonical_level(level - 1);
  std::vector<std::optional<size_t>> container(Z.order());
  for (size_t t = 0; t < Z.order(); ++t)
    container[t] = beta_container(Z.cls(t), coarse, beta);

  std::vector<HelpfulPairCert> out;
  Rat beta2 = beta * beta;
  for (size_t t = 0; t < Z.order(); ++t) {
    if (!container[t]) continue;
    for (size_t u = 0; u < Z.order(); ++u) {
      if (u == t || !container[u]) continue;
      int i = static_cast<int>(*container[t]);
      int j = static_cast<int>(*container[u]);
      const LevelSplit& split = g.split(level, i, j);
      long in_a = static_cast<long>(intersection_count(Z.cls(t), split.a_atoms));
      long in_b = static_cast<long>(intersection_count(Z.cls(t), split.b_atoms));
      long zt = static_cast<long>(Z.cls(t).count());
      if (Rat(std::min(in_a, in_b)) < beta2 * Rat(zt)) continue;
      HelpfulPairCert cert;
      cert.t = static_cast<int>(t);
      cert.u = static_cast<int>(u);
      cert.i = i;
      cert.j = j;
      cert.level = level;
      cert.in_a = in_a;
      cert.in_b = in_b;
      cert.beta = beta;
      cert.z_t = Z.cls(t);
      cert.z_u = Z.cls(u);
      out.push_back(std::move(cert));
    }
  }
  return out;
}

PeelTrace peel(const VertexSet& A, const std::vector<Partition>& trap_partitions,
               const Rat& delta) {
  if (delta <= 0 || delta >= 1) throw Error("peel: delta must lie in (0,1)");
  if (A.none()) throw Error("peel: empty start set");
  PeelTrace trace;
  trace.start = A;
  trace.delta = delta;
  Rat delta6 = rat_pow(delta, 6);
  VertexSet cur = A;
  for (size_t idx = 0; idx < trap_partitions.size(); ++idx) {
    const Partition& P = trap_partitions[idx];
    long cur_size = static_cast<long>(cur.count());
    long best = -1;
    int best_cluster = -1;
    for (size_t c = 0; c < P.order(); ++c) {
      long inter = static_cast<long>(intersection_count(cur, P.cls(c)));
      if (inter > best) {
        best = inter;
        best_cluster = static_cast<int>(c);
      }
    }
    PeelStage stage;
    stage.level_index = static_cast<int>(idx);
    if (Rat(best) >= delta6 * Rat(cur_size)) {
      cur &= P.cls(best_cluster);
      stage.descended = true;
      stage.cluster = best_cluster;
      stage.size_after = static_cast<long>(cur.count());
      ++trace.descents;
      trace.stages.push_back(stage);
    } else {
      stage.descended = false;
      stage.size_after = cur_size;
      trace.stages.push_back(stage);
      break;  // the process stops at the first spread level
    }
  }
  trace.final_set = cur;
  return trace;
}

namespace {

struct PerSource {
  std::vector<Rat> gowers, trap;
  PerSource(int levels, size_t ntraps)
      : gowers(levels + 1, Rat(0)), trap(ntraps + 1, Rat(0)) {}
};

PerSource source_densities(const BlockWeightedGraph& g, const VertexSet& A,
                           const VertexSet& B) {
  PerSource out(g.params().levels, g.traps().size());
  for (size_t u = A.find_first(); u != VertexSet::npos; u = A.find_next(u))
    for (size_t v = B.find_first(); v != VertexSet::npos; v = B.find_next(v))
      for (const LedgerEntry& e :
           g.ledger(static_cast<long>(u), static_cast<long>(v))) {
        if (e.source == LedgerEntry::Source::gowers)
          out.gowers[e.index] += e.amount;
        else
          out.trap[e.index] += e.amount;
      }
  Rat denom = Rat(static_cast<long>(A.count())) * Rat(static_cast<long>(B.count()));
  for (Rat& r : out.gowers) r /= denom;
  for (Rat& r : out.trap) r /= denom;
  return out;
}

}  // namespace

WitnessReport irregularity_witness(const BlockWeightedGraph& g,
                                   const HelpfulPairCert& cert,
                                   const Rat& delta, const Rat& gamma) {
  const LevelSplit& sij = g.split(cert.level, cert.i, cert.j);
  const LevelSplit& sji = g.split(cert.level, cert.j, cert.i);

  WitnessReport rep;
  VertexSet A = cert.z_t & sij.a_atoms;
  VertexSet B = cert.z_t & sij.b_atoms;
  if (A.none() || B.none())
    throw Error("irregularity_witness: certificate split side is empty");

  // W_u: the larger split side of Z_u toward X_i; ties prefer the A side.
  VertexSet wa = cert.z_u & sji.a_atoms;
  VertexSet wb = cert.z_u & sji.b_atoms;
  rep.w_u = (wa.count() >= wb.count()) ? wa : wb;
  if (rep.w_u.none()) throw Error("irregularity_witness: empty W_u");

  // Trap partitions strictly refining P_{level-1}, in placement order.
  std::vector<Partition> trap_parts;
  std::vector<int> trap_index;
  for (const PlacedTrap& t : g.traps())
    if (t.level >= cert.level) {
      trap_parts.push_back(g.canonical_level(t.level));
      trap_index.push_back(t.g);
    }

  rep.peel_a = peel(A, trap_parts, delta);
  rep.peel_b = peel(B, trap_parts, delta);
  rep.a_prime = rep.peel_a.final_set;
  rep.b_prime = rep.peel_b.final_set;

  rep.d_a = density(g, rep.a_prime, rep.w_u);
  rep.d_b = density(g, rep.b_prime, rep.w_u);
  rep.d_pair = density(g, cert.z_t, cert.z_u);
  rep.discrepancy = rep.d_a - rep.d_b;
  if (rep.discrepancy < 0) rep.discrepancy = -rep.discrepancy;

  PerSource pa = source_densities(g, rep.a_prime, rep.w_u);
  PerSource pb = source_densities(g, rep.b_prime, rep.w_u);
  for (int r = 1; r <= g.params().levels; ++r)
    rep.breakdown.push_back(
        {LedgerEntry::Source::gowers, r, pa.gowers[r], pb.gowers[r]});
  for (size_t t = 1; t <= g.traps().size(); ++t)
    rep.breakdown.push_back({LedgerEntry::Source::trap, static_cast<int>(t),
                             pa.trap[t], pb.trap[t]});

  // Claim-style diagnostics over the traps refining the certificate level.
  Rat four_delta2 = 4 * delta * delta;
  Rat two_delta2 = 2 * delta * delta;
  for (size_t idx = 0; idx < trap_index.size(); ++idx) {
    int gidx = trap_index[idx];
    Rat disc = pa.trap[gidx] - pb.trap[gidx];
    if (disc < 0) disc = -disc;
    if (rep.first_trap_disc == 0 && disc > four_delta2) {
      rep.first_trap_disc = gidx;
      Rat alpha = g.traps()[gidx - 1].weight;
      Rat off = pa.trap[gidx] - alpha / 2;
      if (off < 0) off = -off;
      rep.halfpoint_condition = off > two_delta2;
    }
    const Partition& P = trap_parts[idx];
    size_t first = rep.a_prime.find_first();
    bool single = first != VertexSet::npos &&
                  rep.a_prime.is_subset_of(P.cls(P.class_of(first)));
    rep.a_in_single_cluster.push_back(single);
  }

  // Size floors for the witness claim.
  long zt = static_cast<long>(cert.z_t.count());
  long zu = static_cast<long>(cert.z_u.count());
  bool floors =
      Rat(static_cast<long>(rep.a_prime.count())) >= gamma * Rat(zt) &&
      Rat(static_cast<long>(rep.b_prime.count())) >= gamma * Rat(zt) &&
      Rat(static_cast<long>(rep.w_u.count())) >= gamma * Rat(zu);
  rep.found = floors && rep.discrepancy > gamma;

  // Parameter-regime report: exact-arithmetic forms of the inequalities the
  // analysis leans on at full scale.
  rep.parameter_checks.push_back(
      {"beta^4 >= gamma", rat_pow(cert.beta, 4) >= gamma});
  rep.parameter_checks.push_back(
      {"|W_u| >= |Z_u|/4",
       Rat(static_cast<long>(rep.w_u.count())) >= Rat(zu) / 4});
  rep.parameter_checks.push_back(
      {"|A'| >= delta^{6f}|A|",
       Rat(static_cast<long>(rep.a_prime.count())) >=
           rat_pow(delta, 6 * rep.peel_a.descents) *
               Rat(static_cast<long>(rep.peel_a.start.count()))});
  rep.parameter_checks.push_back(
      {"|A'| >= gamma|Z_t|",
       Rat(static_cast<long>(rep.a_prime.count())) >= gamma * Rat(zt)});
  rep.parameter_checks.push_back(
      {"min split >= gamma^{1/2}|Z_t| (as beta^4 >= gamma with the "
       "certificate floor)",
       rat_pow(Rat(std::min(cert.in_a, cert.in_b)), 2) >=
           gamma * Rat(zt) * Rat(zt)});
  return rep;
}

BalancedVectorReport check_balanced_vector_lemma(const BalancedFamily& fam,
                                                 const std::vector<Rat>& lambda,
                                                 const Rat& zeta, const Rat& eta,
                                                 const Rat& xi) {
  BalancedVectorReport out;
  if (static_cast<long>(lambda.size()) != fam.M)
    throw Error("balanced-vector lemma: lambda dimension mismatch");
  Rat sum = 0, linf = 0;
  for (const Rat& v : lambda) {
    if (v < 0) throw Error("balanced-vector lemma: negative lambda entry");
    sum += v;
    if (v > linf) linf = v;
  }
  if (sum != 1) throw Error("balanced-vector lemma: lambda must sum to 1");

  for (long j = 0; j < fam.m; ++j) {
    Rat a_mass = 0;
    for (long t = 0; t < fam.M; ++t)
      if (fam.a_side[j].test(t)) a_mass += lambda[t];
    Rat b_mass = 1 - a_mass;
    Rat side = std::min(a_mass, b_mass);
    if (side > xi) ++out.count;
  }

  if (!fam.verified) {
    out.reason = "family not verified balanced";
    return out;
  }
  if (!(zeta > 0 && zeta <= frac(1, 2))) {
    out.reason = "zeta outside (0, 1/2]";
    return out;
  }
  if (!((1 - eta) * (1 - 4 * xi) > 1 - zeta + zeta * zeta)) {
    out.reason = "hypothesis (1-eta)(1-4xi) > 1 - zeta + zeta^2 fails";
    return out;
  }
  if (!(linf < 1 - zeta)) {
    out.reason = "||lambda||_inf not below 1 - zeta";
    return out;
  }
  out.applicable = true;
  out.holds = Rat(out.count) >= eta * Rat(fam.m);
  return out;
}

std::string WitnessReport::to_json() const {
  std::ostringstream os;
  auto set_json = [&os](const VertexSet& s) {
    os << '[';
    bool first = true;
    for (size_t v = s.find_first(); v != VertexSet::npos; v = s.find_next(v)) {
      os << (first ? "" : ",") << v;
      first = false;
    }
    os << ']';
  };
  os << "{\"found\":" << (found ? "true" : "false") << ",\"a_prime\":";
  set_json(a_prime);
  os << ",\"b_prime\":";
  set_json(b_prime);
  os << ",\"w_u\":";
  set_json(w_u);
  os << ",\"d_a\":\"" << rat_str(d_a) << "\",\"d_b\":\"" << rat_str(d_b)
     << "\",\"d_pair\":\"" << rat_str(d_pair) << "\",\"discrepancy\":\""
     << rat_str(discrepancy) << "\",\"breakdown\":[";
  for (size_t t = 0; t < breakdown.size(); ++t) {
    const SourceDiscrepancy& s = breakdown[t];
    os << (t ? "," : "") << "{\"source\":\""
       << (s.source == LedgerEntry::Source::gowers ? "gowers" : "trap")
       << "\",\"index\":" << s.index << ",\"d_a\":\"" << rat_str(s.d_a)
       << "\",\"d_b\":\"" << rat_str(s.d_b) << "\"}";
  }
  os << "],\"first_trap_disc\":" << first_trap_disc
     << ",\"halfpoint_condition\":" << (halfpoint_condition ? "true" : "false")
     << ",\"parameter_checks\":{";
  for (size_t t = 0; t < parameter_checks.size(); ++t)
    os << (t ? "," : "") << "\"" << parameter_checks[t].first
       << "\":" << (parameter_checks[t].second ? "true" : "false");
  os << "}}";
  return os.str();
}

}  // namespace regforge
