#pragma once

#include <boost/dynamic_bitset.hpp>

#include <iosfwd>
#include <optional>
#include <vector>

#include "regforge/rational.hpp"

namespace regforge {

using VertexSet = boost::dynamic_bitset<>;

// |a & b| without allocating the intersection.
size_t intersection_count(const VertexSet& a, const VertexSet& b);

VertexSet set_of(size_t n, std::initializer_list<size_t> members);

// Equal-class partition of [n] with inverse lookup.
class Partition {
 public:
  // k consecutive integer intervals; requires k | n.
  static Partition canonical(size_t n, size_t k);
  // Validates the classes: equal sizes, disjoint, covering [n].
  static Partition from_classes(size_t n, std::vector<VertexSet> classes);

  size_t n() const { return n_; }
  size_t order() const { return classes_.size(); }
  size_t class_size() const { return n_ / classes_.size(); }
  const VertexSet& cls(size_t i) const { return classes_[i]; }
  const std::vector<VertexSet>& classes() const { return classes_; }
  int class_of(size_t v) const { return class_of_[v]; }

  // Exact refinement: every class of *this lies inside one class of coarser.
  bool refines(const Partition& coarser) const;

  // One line per class, preceded by a "n=<n> k=<k>" header.
  void save(std::ostream& os) const;
  static Partition load(std::istream& is);

 private:
  size_t n_ = 0;
  std::vector<VertexSet> classes_;
  std::vector<int> class_of_;
};

// Z subset_beta X: |Z cap X| >= (1-beta)|Z|. Requires 0 <= beta < 1/2 so the
// container, when it exists, is unique.
bool beta_contains(const VertexSet& Z, const VertexSet& X, const Rat& beta);

// The unique class of P that beta-contains Z, if any.
std::optional<size_t> beta_container(const VertexSet& Z, const Partition& P,
                                     const Rat& beta);

struct BetaRefinement {
  bool refines = false;
  Rat fraction;                  // exact fraction of contained classes
  std::vector<int> container;    // per class of Z; -1 when none
};

// Z beta-refines P iff at least (1-beta)k classes of Z are beta-contained in
// single classes of P.
BetaRefinement beta_refines(const Partition& Z, const Partition& P,
                            const Rat& beta);

}  // namespace regforge
