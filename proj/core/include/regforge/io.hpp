#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "regforge/regcheck.hpp"

namespace regforge {

// On-disk form of a weighted graph: header plus the dense weight matrix as
// "p/q" strings. The ledger and splits travel separately (or are rebuilt
// deterministically from the params' seed).
struct GraphDump {
  long atoms = 0;
  long atom_size = 0;
  std::vector<long> orders;
  ConstructionParams params;
  std::vector<std::vector<Rat>> weights;

  Partition canonical_level(int r) const;
  DensityView view() const;  // keep the dump alive while the view is used
};

GraphDump dump_of(const BlockWeightedGraph& g);
void save_graph_json(const GraphDump& d, std::ostream& os);
GraphDump load_graph_json(std::istream& is);

struct LedgerRow {
  long i = 0, j = 0;
  std::string source;  // "gowers:<r>" or "trap:<g>"
  Rat amount;
};

void save_ledger_csv(const BlockWeightedGraph& g, std::ostream& os);
std::vector<LedgerRow> load_ledger_csv(std::istream& is);

void save_edges_csv(const SampledGraph& s, std::ostream& os);
SampledGraph load_edges_csv(std::istream& is, long n, long atom_size);

// Trap graphs as sorted edge lists over cluster indices.
void save_adj_csv(const AdjMatrix& q, std::ostream& os);
AdjMatrix load_adj_csv(std::istream& is, long m);

void save_balanced(const BalancedFamily& fam, std::ostream& os);
BalancedFamily load_balanced(std::istream& is);

}  // namespace regforge
