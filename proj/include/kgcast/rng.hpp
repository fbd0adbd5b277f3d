#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace kgcast {

// mt19937_64 with hand-rolled variate transforms. The engine's output
// sequence is pinned by the standard; the stdlib distribution classes are
// not, so we do the transforms ourselves to keep seeded runs reproducible
// across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  // [0, 1)
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

  // [0, n), unbiased via rejection on the top of the range.
  uint64_t below(uint64_t n) {
    if (n == 0) return 0;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal() {
    // Box-Muller; the second variate is discarded.
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Exact Poisson sampling: Knuth for small rates, binary splitting above.
  uint64_t poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    uint64_t total = 0;
    while (lambda > 30.0) {
      const double half = lambda / 2.0;
      total += poisson_knuth(half);
      lambda -= half;
    }
    return total + poisson_knuth(lambda);
  }

 private:
  uint64_t poisson_knuth(double lambda) {
    const double cutoff = std::exp(-lambda);
    uint64_t k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform01();
    } while (p > cutoff);
    return k - 1;
  }

  std::mt19937_64 eng_;
};

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable sub-seed derivation, e.g. one stream per grid cell or per tree.
inline uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index = 0) {
  uint64_t s = base ^ 0x9e3779b97f4a7c15ULL;
  for (char c : tag) s = (s ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  s ^= index + 0x632be59bd9b4e019ULL;
  return splitmix64(s);
}

}  // namespace kgcast
