#include "regforge/tower.hpp"

#include <cassert>
#include <sstream>

namespace regforge {

namespace {

long ulong_of(const Int& v) {
  if (!v.fits_ulong_p()) throw Error("tower: value too large for machine word");
  return static_cast<long>(v.get_ui());
}

}  // namespace

// Height of a form: an exact integer, or symbolic_base + offset where
// symbolic_base is itself a (form-kind) TowerCore.
struct TowerHeight {
  Int exact;
  std::shared_ptr<const TowerCore> base;  // null => exact
  long offset = 0;

  bool is_exact() const { return base == nullptr; }
};

// Exact value, or the form E(height, top). Canonical form invariants:
// height >= 1 and top >= bit_limit, so every form's value strictly exceeds
// every materializable integer and taller canonical forms strictly dominate.
struct TowerCore {
  std::optional<Int> exact;
  TowerHeight height;
  Int top;

  bool is_exact() const { return exact.has_value(); }

  static std::shared_ptr<const TowerCore> make_exact(Int v) {
    auto c = std::make_shared<TowerCore>();
    c->exact = std::move(v);
    return c;
  }

  // Normalize E(height, top): raise small tops one exponent level at a time
  // until the top clears the bit limit or the height is used up.
  static std::shared_ptr<const TowerCore> normalize(TowerHeight h, Int top,
                                                    const TowerLimits& lim) {
    if (top < 0) throw Error("tower form: negative top");
    // Exact heights must stay below every symbolic height (whose value is at
    // least 2^bit_limit) for comparisons to order forms correctly.
    if (h.is_exact() && bit_length(h.exact) > lim.bit_limit)
      throw Error("tower form: exact height exceeds the bit limit");
    while (top < lim.bit_limit) {
      bool at_zero = h.is_exact() ? (h.exact == 0) : false;
      if (at_zero) return make_exact(std::move(top));
      if (h.is_exact() && h.exact < 0) throw Error("tower form: negative height");
      top = Int(1) << static_cast<unsigned long>(top.get_ui());
      if (h.is_exact())
        h.exact -= 1;
      else
        h.offset -= 1;
    }
    bool at_zero = h.is_exact() ? (h.exact == 0) : false;
    if (at_zero) return make_exact(std::move(top));
    if (h.is_exact() && h.exact < 0) throw Error("tower form: negative height");
    auto c = std::make_shared<TowerCore>();
    c->height = std::move(h);
    c->top = std::move(top);
    return c;
  }
};

namespace {

// Does E(steps, top) exceed 2^cap_bits? Tracks only sizes; aborts early.
bool tower_exceeds(const Int& steps, const Int& top, long cap_bits) {
  if (steps <= 0) return bit_length(top) > cap_bits;
  Int val = top;
  Int s = steps;
  while (s > 0) {
    if (val >= cap_bits) return true;  // next value needs val+1 > cap bits
    val = Int(1) << static_cast<unsigned long>(val.get_ui());
    s -= 1;
    if (bit_length(val) > cap_bits) return true;
  }
  return val > (Int(1) << static_cast<unsigned long>(cap_bits));
}

// Materialize E(steps, top); caller must have checked it fits.
Int tower_eval(const Int& steps, const Int& top) {
  Int val = top;
  Int s = steps;
  while (s > 0) {
    val = Int(1) << static_cast<unsigned long>(ulong_of(val));
    s -= 1;
  }
  return val;
}

Ord ord_of(int c) { return c < 0 ? Ord::less : (c == 0 ? Ord::equal : Ord::greater); }
Ord flip(Ord o) {
  return o == Ord::less ? Ord::greater : (o == Ord::greater ? Ord::less : Ord::equal);
}

Ord core_cmp(const TowerCore& a, const TowerCore& b);

Ord height_cmp(const TowerHeight& a, const TowerHeight& b) {
  if (a.is_exact() && b.is_exact()) return ord_of(cmp(a.exact, b.exact));
  if (a.is_exact()) return Ord::less;     // symbolic heights dwarf exact ones
  if (b.is_exact()) return Ord::greater;
  Ord c = core_cmp(*a.base, *b.base);
  if (c != Ord::equal) return c;          // base gap dwarfs the offsets
  return ord_of(a.offset < b.offset ? -1 : (a.offset == b.offset ? 0 : 1));
}

// Form vs materialized integer.
Ord form_vs_exact(const TowerCore& f, const Int& v) {
  long cap = bit_length(v);
  if (!f.height.is_exact()) return Ord::greater;
  if (tower_exceeds(f.height.exact, f.top, cap)) return Ord::greater;
  return ord_of(cmp(tower_eval(f.height.exact, f.top), v));
}

Ord core_cmp(const TowerCore& a, const TowerCore& b) {
  if (a.is_exact() && b.is_exact()) return ord_of(cmp(*a.exact, *b.exact));
  if (a.is_exact()) return flip(form_vs_exact(b, *a.exact));
  if (b.is_exact()) return form_vs_exact(a, *b.exact);

  Ord hc = height_cmp(a.height, b.height);
  if (hc == Ord::equal) return ord_of(cmp(a.top, b.top));

  const TowerCore& tall = (hc == Ord::greater) ? a : b;
  const TowerCore& shrt = (hc == Ord::greater) ? b : a;
  Ord verdict = (hc == Ord::greater) ? Ord::greater : Ord::less;

  // Canonical tops guarantee the taller form wins outright except when both
  // heights are exact and close; resolve that case against E(delta, top).
  if (a.height.is_exact() && b.height.is_exact()) {
    Int delta = tall.height.exact - shrt.height.exact;
    long cap = bit_length(shrt.top);
    if (tower_exceeds(delta, tall.top, cap)) return verdict;
    Ord tc = ord_of(cmp(shrt.top, tower_eval(delta, tall.top)));
    if (tc == Ord::equal) return Ord::equal;
    return tc == Ord::less ? (hc == Ord::greater ? Ord::greater : Ord::less)
                           : (hc == Ord::greater ? Ord::less : Ord::greater);
  }
  return verdict;
}

std::shared_ptr<const TowerCore> core_pow2(const TowerCore& c, const TowerLimits& lim) {
  if (c.is_exact()) {
    const Int& v = *c.exact;
    if (v < 0) throw Error("pow2 of negative value");
    if (v < lim.bit_limit)
      return TowerCore::make_exact(Int(1) << static_cast<unsigned long>(v.get_ui()));
    return TowerCore::normalize(TowerHeight{Int(1), nullptr, 0}, v, lim);
  }
  TowerHeight h = c.height;
  if (h.is_exact())
    h.exact += 1;
  else
    h.offset += 1;
  return TowerCore::normalize(std::move(h), c.top, lim);
}

std::shared_ptr<const TowerCore> core_floor_log2(const TowerCore& c,
                                                 const TowerLimits& lim) {
  if (c.is_exact()) {
    if (*c.exact < 1) throw Error("floor_log2: argument must be >= 1");
    return TowerCore::make_exact(Int(bit_length(*c.exact) - 1));
  }
  TowerHeight h = c.height;
  if (h.is_exact())
    h.exact -= 1;
  else
    h.offset -= 1;
  return TowerCore::normalize(std::move(h), c.top, lim);
}

std::string core_str(const TowerCore& c) {
  if (c.is_exact()) {
    std::string digits = c.exact->get_str();
    if (digits.size() <= 1000) return digits;
    std::ostringstream os;
    os << "~2^" << (bit_length(*c.exact) - 1);
    return os.str();
  }
  std::ostringstream os;
  os << "tower[h=";
  if (c.height.is_exact())
    os << c.height.exact.get_str();
  else
    os << "(" << core_str(*c.height.base) << (c.height.offset >= 0 ? "+" : "")
       << c.height.offset << ")";
  os << ", top=";
  std::string t = c.top.get_str();
  if (t.size() <= 40)
    os << t;
  else
    os << "~2^" << (bit_length(c.top) - 1);
  os << "]";
  return os.str();
}

}  // namespace

TowerNum::TowerNum() : TowerNum(TowerCore::make_exact(Int(0))) {}
TowerNum::TowerNum(std::shared_ptr<const TowerCore> tight)
    : lo_(tight), hi_(std::move(tight)) {}
TowerNum::TowerNum(std::shared_ptr<const TowerCore> lo,
                   std::shared_ptr<const TowerCore> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {}

TowerNum TowerNum::exact(Int v) { return TowerNum(TowerCore::make_exact(std::move(v))); }

bool TowerNum::is_tight() const {
  return lo_ == hi_ || core_cmp(*lo_, *hi_) == Ord::equal;
}
bool TowerNum::is_exact() const { return is_tight() && lo_->is_exact(); }

const Int& TowerNum::exact_value() const {
  if (!is_exact()) throw Error("TowerNum: not materialized: " + str());
  return *lo_->exact;
}

std::optional<long> TowerNum::to_long() const {
  if (!is_exact() || !lo_->exact->fits_slong_p()) return std::nullopt;
  return static_cast<long>(lo_->exact->get_si());
}

TowerNum TowerNum::tower(const Int& x, const TowerLimits& lim) {
  if (x < 0) throw Error("tower: negative argument");
  return TowerNum(TowerCore::normalize(TowerHeight{x, nullptr, 0}, Int(1), lim));
}

TowerNum TowerNum::tower_of(const TowerNum& x, const TowerLimits& lim) {
  auto one = [&lim](const std::shared_ptr<const TowerCore>& core) {
    if (core->is_exact())
      return TowerCore::normalize(TowerHeight{*core->exact, nullptr, 0}, Int(1), lim);
    return TowerCore::normalize(TowerHeight{Int(0), core, 0}, Int(1), lim);
  };
  return TowerNum(one(x.lo_), one(x.hi_));
}

TowerNum TowerNum::wowzer(long x, const TowerLimits& lim) {
  if (x < 0) throw Error("wowzer: negative argument");
  TowerNum w = TowerNum::exact(Int(1));
  for (long i = 0; i < x; ++i) w = tower_of(w, lim);
  return w;
}

TowerNum TowerNum::t_phi(long x, const TowerLimits& lim) {
  if (x < 0) throw Error("t_phi: negative argument");
  // T^phi(i) = 2^e_i with e_{i+1} = e_i + ceil(2^{e_i}/16); exact while the
  // shift fits, then bracketed between pure forms.
  Int e = 0;
  long i = 0;
  const long exact_cap = 1 << 24;  // largest exponent we shift by explicitly
  for (; i < x; ++i) {
    if (e >= exact_cap) break;
    long ev = ulong_of(e);
    if (ev >= 4)
      e += Int(1) << static_cast<unsigned long>(ev - 4);
    else
      e += 1;  // ceil(2^e/16) = 1 for e <= 4
  }
  if (i == x) {
    if (e < lim.bit_limit)
      return TowerNum(TowerCore::make_exact(Int(1) << static_cast<unsigned long>(e.get_ui())));
    return TowerNum(TowerCore::normalize(TowerHeight{Int(1), nullptr, 0}, e, lim));
  }
  // First bracketed exponent step from an exact e: e' in [2^{e-4}, 2^{e-3}].
  auto lo = TowerCore::normalize(TowerHeight{Int(1), nullptr, 0}, e - 4, lim);
  auto hi = TowerCore::normalize(TowerHeight{Int(1), nullptr, 0}, e - 3, lim);
  ++i;
  for (; i < x; ++i) {
    // e in [E(h,a), E(h,b)] gives e + 2^{e-4} in [E(h+1, a-1), E(h+1, b)].
    if (lo->is_exact() || hi->is_exact())
      throw Error("t_phi: bracket endpoint collapsed unexpectedly");
    lo = TowerCore::normalize(TowerHeight{lo->height.exact + 1, nullptr, 0},
                              lo->top - 1, lim);
    hi = TowerCore::normalize(TowerHeight{hi->height.exact + 1, nullptr, 0},
                              hi->top, lim);
  }
  auto vlo = core_pow2(*lo, lim);
  auto vhi = core_pow2(*hi, lim);
  return TowerNum(vlo, vhi);
}

TowerNum TowerNum::pow2(const TowerLimits& lim) const {
  return TowerNum(core_pow2(*lo_, lim), core_pow2(*hi_, lim));
}

TowerNum TowerNum::floor_log2(const TowerLimits& lim) const {
  return TowerNum(core_floor_log2(*lo_, lim), core_floor_log2(*hi_, lim));
}

TowerNum TowerNum::floor_loglog(const TowerLimits& lim) const {
  return floor_log2(lim).floor_log2(lim);
}

Ord TowerNum::compare(const TowerNum& a, const TowerNum& b) {
  if (a.is_tight() && b.is_tight()) return core_cmp(*a.lo_, *b.lo_);
  if (core_cmp(*a.hi_, *b.lo_) == Ord::less) return Ord::less;
  if (core_cmp(*b.hi_, *a.lo_) == Ord::less) return Ord::greater;
  // Overlapping brackets: identical brackets compare equal, otherwise order
  // structurally by endpoints (documented convention; still a total order).
  Ord lc = core_cmp(*a.lo_, *b.lo_);
  if (lc != Ord::equal) return lc;
  return core_cmp(*a.hi_, *b.hi_);
}

std::optional<Int> TowerNum::approx_height() const {
  if (!is_tight()) return std::nullopt;
  auto depth_of = [](Int v) {
    long d = 0;
    while (v >= 2) {
      v = Int(bit_length(v) - 1);
      ++d;
    }
    return d;
  };
  if (lo_->is_exact()) return Int(depth_of(*lo_->exact));
  if (!lo_->height.is_exact()) return std::nullopt;
  return lo_->height.exact + depth_of(lo_->top);
}

std::string TowerNum::str() const {
  if (is_tight()) return core_str(*lo_);
  return "[" + core_str(*lo_) + ", " + core_str(*hi_) + "]";
}

Rat TrapSchedule::total_weight() const {
  Rat s = 0;
  for (const Rat& w : weights) s += w;
  return s;
}

TrapSchedule TrapSchedule::from_levels(const std::vector<long>& levels) {
  TrapSchedule ts;
  ts.levels = levels;
  ts.count = static_cast<int>(levels.size());
  for (int g = 1; g <= ts.count; ++g) ts.weights.push_back(four_pow_neg(g));
  for (size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1])
      throw Error("trap schedule: levels must be strictly increasing");
  return ts;
}

TrapSchedule TrapSchedule::from_first_level(long w1, int count,
                                            const TowerLimits& lim) {
  if (w1 < 1 || count < 1) throw Error("trap schedule: need w1 >= 1, count >= 1");
  std::vector<long> levels{w1};
  for (int g = 2; g <= count; ++g) {
    TowerNum tp = TowerNum::t_phi(levels.back(), lim);
    TowerNum ll = tp.floor_loglog(lim);
    auto next = ll.to_long();
    if (!next)
      throw Error("trap schedule step g=" + std::to_string(g) +
                  ": floor(log log T^phi(" + std::to_string(levels.back()) +
                  ")) = " + ll.str() + " is not materializable");
    if (*next <= levels.back())
      throw Error("trap schedule step g=" + std::to_string(g) + ": w(" +
                  std::to_string(g) + ")=" + std::to_string(*next) +
                  " does not exceed w(" + std::to_string(g - 1) + ")=" +
                  std::to_string(levels.back()));
    levels.push_back(*next);
  }
  return from_levels(levels);
}

}  // namespace regforge
