#pragma once

#include <cmath>
#include <cstdint>

namespace pform {

/**
 * splitmix64 keyed by (seed, stream, step): every lattice variable draws from
 * its own counter-based stream, so sweeps are reproducible independent of
 * thread count and update order within a colour class.
 */
struct SplitMix {
  uint64_t state;

  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  explicit SplitMix(uint64_t seed) : state(mix(seed)) {}
  SplitMix(uint64_t seed, uint64_t stream, uint64_t step)
      : state(mix(mix(mix(seed) ^ stream) ^ step)) {}

  uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /** uniform in [0, 1) */
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /** uniform in [lo, hi) */
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /** standard normal (Box-Muller) */
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  uint64_t below(uint64_t n) { return next() % n; }
};

}  // namespace pform
