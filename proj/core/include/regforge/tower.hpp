#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "regforge/rational.hpp"

namespace regforge {

enum class Ord { less, equal, greater };

struct TowerLimits {
  // Values with at most this many bits are materialized as integers;
  // anything larger stays in symbolic form.
  long bit_limit = 1 << 20;
};

struct TowerCore;

// Lazily represented huge integer. Exact below the bit limit; above it, an
// iterated-exponential form E(h, t) = 2^2^...^2^t (h twos, integer top t).
// Heights may themselves be symbolic (an earlier TowerNum plus a small
// offset), which keeps W-type chains representable. A value that cannot be
// pinned exactly is carried as a [lo, hi] bracket of forms; comparisons are
// definitive whenever the brackets separate, and fall back to a documented
// structural order otherwise.
class TowerNum {
 public:
  TowerNum();  // zero

  static TowerNum exact(Int v);
  // T(x): T(0)=1, T(x)=2^T(x-1).
  static TowerNum tower(const Int& x, const TowerLimits& lim = {});
  // T applied to an arbitrary (possibly symbolic) argument; wowzer needs this.
  static TowerNum tower_of(const TowerNum& x, const TowerLimits& lim = {});
  // W(x): W(0)=1, W(x)=T(W(x-1)).
  static TowerNum wowzer(long x, const TowerLimits& lim = {});
  // T^phi(x) = T^phi(x-1)*phi(T^phi(x-1)) with phi(m)=2^ceil(m/16).
  // Exact as long as the recurrence fits; bracketed beyond that.
  static TowerNum t_phi(long x, const TowerLimits& lim = {});

  bool is_exact() const;
  bool is_tight() const;  // single value (exact or one symbolic form)
  const Int& exact_value() const;
  std::optional<long> to_long() const;

  TowerNum pow2(const TowerLimits& lim = {}) const;
  TowerNum floor_log2(const TowerLimits& lim = {}) const;
  TowerNum floor_loglog(const TowerLimits& lim = {}) const;

  // Total order, consistent with integer order on exact values.
  static Ord compare(const TowerNum& a, const TowerNum& b);
  bool geq(const TowerNum& o) const { return compare(*this, o) != Ord::less; }
  bool gt(const TowerNum& o) const { return compare(*this, o) == Ord::greater; }
  bool eq(const TowerNum& o) const { return compare(*this, o) == Ord::equal; }

  // Total tower height counting the top's own depth; T(6) reports 6.
  // Empty for symbolic-height (W-type) forms.
  std::optional<Int> approx_height() const;

  std::string str() const;

 private:
  explicit TowerNum(std::shared_ptr<const TowerCore> tight);
  TowerNum(std::shared_ptr<const TowerCore> lo, std::shared_ptr<const TowerCore> hi);
  std::shared_ptr<const TowerCore> lo_, hi_;
  friend struct TowerCore;
};

// Trap placement schedule: levels b_g = w(g) with weights 4^{-g}.
struct TrapSchedule {
  std::vector<long> levels;  // strictly increasing
  std::vector<Rat> weights;  // 4^{-1}, 4^{-2}, ...
  int count = 0;

  Rat total_weight() const;

  // w(1) = w1, w(x+1) = floor(log log T^phi(w(x))). Throws when a step is
  // not materializable or the sequence fails to increase.
  static TrapSchedule from_first_level(long w1, int count,
                                       const TowerLimits& lim = {});
  // Desk-scale runs supply levels directly.
  static TrapSchedule from_levels(const std::vector<long>& levels);
};

}  // namespace regforge
