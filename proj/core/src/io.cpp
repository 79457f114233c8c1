#include "regforge/io.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>
#include <sstream>

namespace regforge {

using nlohmann::json;

Partition GraphDump::canonical_level(int r) const {
  return Partition::canonical(static_cast<size_t>(atoms),
                              static_cast<size_t>(orders.at(r)));
}

DensityView GraphDump::view() const {
  DensityView v;
  v.n = atoms;
  const GraphDump* self = this;
  v.cell = [self](long u, long w) -> Rat { return self->weights[u][w]; };
  v.row_into = [self](long u, const VertexSet& B) -> Rat {
    Rat s = 0;
    for (size_t w = B.find_first(); w != VertexSet::npos; w = B.find_next(w))
      s += self->weights[u][w];
    return s;
  };
  return v;
}

GraphDump dump_of(const BlockWeightedGraph& g) {
  GraphDump d;
  d.atoms = g.atoms();
  d.atom_size = g.atom_size();
  d.orders = g.orders();
  d.params = g.params();
  d.weights.assign(d.atoms, std::vector<Rat>(d.atoms));
  for (long u = 0; u < d.atoms; ++u)
    for (long v = 0; v < d.atoms; ++v) d.weights[u][v] = g.weight(u, v);
  return d;
}

void save_graph_json(const GraphDump& d, std::ostream& os) {
  json j;
  j["m_s"] = d.atoms;
  j["atom_size"] = d.atom_size;
  j["canonical_orders"] = d.orders;
  j["params"] = {{"levels", d.params.levels},
                 {"delta_base", rat_str(d.params.delta_base)},
                 {"trap_levels", d.params.trap_levels},
                 {"seed", d.params.seed},
                 {"atoms_per_class", d.params.atoms_per_class}};
  json rows = json::array();
  for (long u = 0; u < d.atoms; ++u) {
    json row = json::array();
    for (long v = 0; v < d.atoms; ++v) row.push_back(rat_str(d.weights[u][v]));
    rows.push_back(std::move(row));
  }
  j["weights"] = std::move(rows);
  os << j.dump(1) << "\n";
}

GraphDump load_graph_json(std::istream& is) {
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw Error(std::string("graph load: invalid JSON: ") + e.what());
  }
  GraphDump d;
  d.atoms = j.at("m_s").get<long>();
  d.atom_size = j.at("atom_size").get<long>();
  d.orders = j.at("canonical_orders").get<std::vector<long>>();
  const json& p = j.at("params");
  d.params.levels = p.at("levels").get<int>();
  d.params.delta_base = parse_rational(p.at("delta_base").get<std::string>());
  d.params.trap_levels = p.at("trap_levels").get<std::vector<int>>();
  d.params.seed = p.at("seed").get<uint64_t>();
  d.params.atoms_per_class = p.at("atoms_per_class").get<long>();
  const json& rows = j.at("weights");
  if (static_cast<long>(rows.size()) != d.atoms)
    throw Error("graph load: weight matrix has wrong row count");
  d.weights.assign(d.atoms, std::vector<Rat>(d.atoms));
  for (long u = 0; u < d.atoms; ++u) {
    if (static_cast<long>(rows[u].size()) != d.atoms)
      throw Error("graph load: ragged weight matrix");
    for (long v = 0; v < d.atoms; ++v)
      d.weights[u][v] = parse_rational(rows[u][v].get<std::string>());
  }
  for (long u = 0; u < d.atoms; ++u)
    for (long v = 0; v < d.atoms; ++v)
      if (d.weights[u][v] != d.weights[v][u])
        throw Error("graph load: weight matrix not symmetric");
  return d;
}

void save_ledger_csv(const BlockWeightedGraph& g, std::ostream& os) {
  os << "i,j,source,amount\n";
  for (long u = 0; u < g.atoms(); ++u)
    for (long v = u; v < g.atoms(); ++v)
      for (const LedgerEntry& e : g.ledger(u, v)) {
        os << u << ',' << v << ','
           << (e.source == LedgerEntry::Source::gowers ? "gowers:" : "trap:")
           << e.index << ',' << rat_str(e.amount) << "\n";
      }
}

std::vector<LedgerRow> load_ledger_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "i,j,source,amount")
    throw Error("ledger load: missing header");
  std::vector<LedgerRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    LedgerRow r;
    std::string amount;
    char comma;
    if (!(ls >> r.i >> comma >> r.j >> comma)) throw Error("ledger load: bad row");
    if (!std::getline(ls, r.source, ',')) throw Error("ledger load: bad row");
    if (!std::getline(ls, amount)) throw Error("ledger load: bad row");
    r.amount = parse_rational(amount);
    rows.push_back(std::move(r));
  }
  return rows;
}

void save_edges_csv(const SampledGraph& s, std::ostream& os) {
  os << "u,v\n";
  for (long u = 0; u < s.n; ++u)
    for (size_t v = s.adj[u].find_first(); v != VertexSet::npos;
         v = s.adj[u].find_next(v))
      if (static_cast<long>(v) > u) os << u << ',' << v << "\n";
}

SampledGraph load_edges_csv(std::istream& is, long n, long atom_size) {
  std::string line;
  if (!std::getline(is, line) || line != "u,v")
    throw Error("edge list load: missing header");
  SampledGraph s;
  s.n = n;
  s.atom_size = atom_size;
  s.adj.assign(n, VertexSet(static_cast<size_t>(n)));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    long u, v;
    char comma;
    std::istringstream ls(line);
    if (!(ls >> u >> comma >> v) || u < 0 || v < 0 || u >= n || v >= n)
      throw Error("edge list load: bad row '" + line + "'");
    s.adj[u].set(v);
    s.adj[v].set(u);
  }
  return s;
}

void save_adj_csv(const AdjMatrix& q, std::ostream& os) {
  os << "u,v\n";
  for (size_t u = 0; u < q.size(); ++u)
    for (size_t v = q[u].find_first(); v != VertexSet::npos;
         v = q[u].find_next(v))
      if (v > u) os << u << ',' << v << "\n";
}

AdjMatrix load_adj_csv(std::istream& is, long m) {
  std::string line;
  if (!std::getline(is, line) || line != "u,v")
    throw Error("trap graph load: missing header");
  AdjMatrix q(m, VertexSet(static_cast<size_t>(m)));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    long u, v;
    char comma;
    std::istringstream ls(line);
    if (!(ls >> u >> comma >> v) || u < 0 || v < 0 || u >= m || v >= m)
      throw Error("trap graph load: bad row '" + line + "'");
    q[u].set(v);
    q[v].set(u);
  }
  return q;
}

void save_balanced(const BalancedFamily& fam, std::ostream& os) {
  os << "m=" << fam.m << " M=" << fam.M
     << " verified=" << (fam.verified ? 1 : 0) << "\n";
  for (const VertexSet& a : fam.a_side) {
    bool first = true;
    for (size_t t = a.find_first(); t != VertexSet::npos; t = a.find_next(t)) {
      os << (first ? "" : " ") << t;
      first = false;
    }
    os << "\n";
  }
}

BalancedFamily load_balanced(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw Error("balanced load: missing header");
  BalancedFamily fam;
  int verified = 0;
  if (sscanf(header.c_str(), "m=%ld M=%ld verified=%d", &fam.m, &fam.M,
             &verified) != 3)
    throw Error("balanced load: bad header '" + header + "'");
  fam.verified = verified != 0;
  std::string line;
  for (long i = 0; i < fam.m; ++i) {
    if (!std::getline(is, line)) throw Error("balanced load: truncated file");
    VertexSet a(fam.M);
    std::istringstream ls(line);
    long t;
    while (ls >> t) {
      if (t < 0 || t >= fam.M) throw Error("balanced load: index out of range");
      a.set(t);
    }
    fam.a_side.push_back(std::move(a));
  }
  return fam;
}

}  // namespace regforge
