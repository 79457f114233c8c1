#include "regforge/partition.hpp"

#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace regforge {

VertexSet set_of(size_t n, std::initializer_list<size_t> members) {
  VertexSet s(n);
  for (size_t v : members) s.set(v);
  return s;
}

size_t intersection_count(const VertexSet& a, const VertexSet& b) {
  static thread_local std::vector<VertexSet::block_type> ba, bb;
  ba.resize(a.num_blocks());
  bb.resize(b.num_blocks());
  boost::to_block_range(a, ba.begin());
  boost::to_block_range(b, bb.begin());
  size_t nb = std::min(ba.size(), bb.size());
  size_t c = 0;
  for (size_t i = 0; i < nb; ++i)
    c += static_cast<size_t>(std::popcount(ba[i] & bb[i]));
  return c;
}

Partition Partition::canonical(size_t n, size_t k) {
  if (k == 0 || n == 0) throw Error("canonical partition: empty universe or order");
  if (n % k != 0)
    throw Error("canonical partition: order " + std::to_string(k) +
                " must divide universe size " + std::to_string(n));
  size_t len = n / k;
  std::vector<VertexSet> classes(k, VertexSet(n));
  for (size_t i = 0; i < k; ++i)
    for (size_t v = i * len; v < (i + 1) * len; ++v) classes[i].set(v);
  return from_classes(n, std::move(classes));
}

Partition Partition::from_classes(size_t n, std::vector<VertexSet> classes) {
  if (classes.empty()) throw Error("partition: no classes");
  Partition p;
  p.n_ = n;
  p.class_of_.assign(n, -1);
  size_t size0 = classes[0].count();
  for (size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].size() != n) throw Error("partition: class bitset size mismatch");
    if (classes[i].count() != size0)
      throw Error("partition: classes must have equal size (" +
                  std::to_string(classes[i].count()) + " vs " +
                  std::to_string(size0) + ")");
    for (size_t v = classes[i].find_first(); v != VertexSet::npos;
         v = classes[i].find_next(v)) {
      if (p.class_of_[v] != -1) throw Error("partition: classes overlap");
      p.class_of_[v] = static_cast<int>(i);
    }
  }
  for (size_t v = 0; v < n; ++v)
    if (p.class_of_[v] == -1) throw Error("partition: classes do not cover [n]");
  p.classes_ = std::move(classes);
  return p;
}

bool Partition::refines(const Partition& coarser) const {
  if (coarser.n_ != n_) throw Error("refines: universe mismatch");
  for (const VertexSet& z : classes_) {
    size_t v = z.find_first();
    const VertexSet& target = coarser.cls(coarser.class_of(v));
    if (!z.is_subset_of(target)) return false;
  }
  return true;
}

void Partition::save(std::ostream& os) const {
  os << "n=" << n_ << " k=" << order() << "\n";
  for (const VertexSet& c : classes_) {
    bool first = true;
    for (size_t v = c.find_first(); v != VertexSet::npos; v = c.find_next(v)) {
      if (!first) os << ' ';
      os << v;
      first = false;
    }
    os << "\n";
  }
}

Partition Partition::load(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw Error("partition load: missing header");
  size_t n = 0, k = 0;
  if (sscanf(header.c_str(), "n=%zu k=%zu", &n, &k) != 2)
    throw Error("partition load: bad header '" + header + "'");
  std::vector<VertexSet> classes;
  std::string line;
  while (classes.size() < k && std::getline(is, line)) {
    VertexSet c(n);
    std::istringstream ls(line);
    size_t v;
    while (ls >> v) {
      if (v >= n) throw Error("partition load: vertex out of range");
      c.set(v);
    }
    classes.push_back(std::move(c));
  }
  if (classes.size() != k) throw Error("partition load: class count mismatch");
  return from_classes(n, std::move(classes));
}

bool beta_contains(const VertexSet& Z, const VertexSet& X, const Rat& beta) {
  if (beta < 0 || beta >= Rat(1, 2))
    throw Error("beta_contains: beta must lie in [0, 1/2), got " + rat_str(beta));
  size_t zn = Z.count();
  if (zn == 0) throw Error("beta_contains: empty Z");
  // |Z cap X| >= (1-beta)|Z|, compared exactly.
  Rat lhs(static_cast<unsigned long>(intersection_count(Z, X)));
  return lhs >= (1 - beta) * Rat(static_cast<unsigned long>(zn));
}

std::optional<size_t> beta_container(const VertexSet& Z, const Partition& P,
                                     const Rat& beta) {
  // Scan every class: beta < 1/2 makes a second container impossible, and a
  // duplicate would mean the partition structure is broken.
  std::optional<size_t> found;
  for (size_t i = 0; i < P.order(); ++i)
    if (beta_contains(Z, P.cls(i), beta)) {
      if (found) throw Error("beta_container: two containers at beta < 1/2");
      found = i;
    }
  return found;
}

BetaRefinement beta_refines(const Partition& Z, const Partition& P,
                            const Rat& beta) {
  if (Z.n() != P.n()) throw Error("beta_refines: universe mismatch");
  BetaRefinement out;
  out.container.assign(Z.order(), -1);
  size_t contained = 0;
  for (size_t t = 0; t < Z.order(); ++t) {
    auto c = beta_container(Z.cls(t), P, beta);
    if (c) {
      out.container[t] = static_cast<int>(*c);
      ++contained;
    }
  }
  size_t k = Z.order();
  out.fraction = Rat(static_cast<unsigned long>(contained),
                     static_cast<unsigned long>(k));
  out.fraction.canonicalize();
  out.refines = Rat(static_cast<unsigned long>(contained)) >=
                (1 - beta) * Rat(static_cast<unsigned long>(k));
  return out;
}

}  // namespace regforge
