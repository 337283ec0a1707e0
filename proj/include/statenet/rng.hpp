#pragma once

#include <cstdint>
#include <random>

#include "statenet/common.hpp"

namespace statenet {

/// Deterministic uniform sampling on top of mt19937_64. The bit-to-double
/// mapping is pinned here (not delegated to std::uniform_real_distribution,
/// whose output is implementation-defined) so identical seeds give
/// identical trajectories everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  Vec uniform_vec(int n, double lo, double hi) {
    Vec v(static_cast<std::size_t>(n));
    for (double& x : v) x = uniform(lo, hi);
    return v;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace statenet
