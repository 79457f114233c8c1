#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "regforge/rational.hpp"

namespace regforge {

// All randomness flows from one root seed through named substreams, so any
// component can be replayed in isolation. Bounded draws avoid
// std::uniform_int_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // Substream derivation: hash the parent seed with a label and indices.
  static uint64_t derive(uint64_t root, std::string_view label, uint64_t a = 0,
                         uint64_t b = 0) {
    uint64_t h = 0xcbf29ce484222325ull ^ root;
    auto mix = [&h](uint64_t x) {
      h ^= x;
      h *= 0x100000001b3ull;
      h ^= h >> 29;
      h *= 0xbf58476d1ce4e5b9ull;
      h ^= h >> 32;
    };
    for (char c : label) mix(static_cast<uint64_t>(static_cast<unsigned char>(c)));
    mix(a + 0x9e3779b97f4a7c15ull);
    mix(b + 0x94d049bb133111ebull);
    return h;
  }

  static Rng substream(uint64_t root, std::string_view label, uint64_t a = 0,
                       uint64_t b = 0) {
    return Rng(derive(root, label, a, b));
  }

  uint64_t u64() { return gen_(); }

  // Uniform in [0, n) by rejection; portable and unbiased.
  uint64_t below(uint64_t n) {
    if (n == 0) throw Error("Rng::below(0)");
    uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      uint64_t v = gen_();
      if (v >= threshold) return v % n;
    }
  }

  bool coin() { return (gen_() & 1ull) != 0; }

  // Exact Bernoulli(p) for rational p in [0,1] with denominator < 2^63.
  bool bernoulli(const Rat& p) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    const Int& den = p.get_den();
    const Int& num = p.get_num();
    if (!den.fits_ulong_p() && bit_length(den) > 63)
      throw Error("bernoulli: denominator too large (" + den.get_str() + ")");
    uint64_t d = static_cast<uint64_t>(den.get_ui());
    uint64_t n = static_cast<uint64_t>(num.get_ui());
    return below(d) < n;
  }

  // Uniform random subset of [m] of the given size (partial Fisher-Yates).
  std::vector<int> subset(int m, int size) {
    std::vector<int> pool(m);
    for (int i = 0; i < m; ++i) pool[i] = i;
    for (int i = 0; i < size; ++i) {
      int j = i + static_cast<int>(below(static_cast<uint64_t>(m - i)));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(size);
    return pool;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace regforge
