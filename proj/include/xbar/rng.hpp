/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef XBAR_RNG_HPP
#define XBAR_RNG_HPP

#include <cstdint>
#include <random>

namespace xbar {

/// Seed scrambler (splitmix64). Used to derive independent sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream. mt19937_64 output is pinned by the standard,
/// and all variate transforms are implemented here, so sequences are
/// bit-identical across platforms and standard libraries. One stream is owned
/// by exactly one consumer; there is no global RNG state anywhere.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : gen_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform index in [0, n). Rejection sampling, no modulo bias.
  std::size_t uniform_index(std::size_t n) {
    if (n <= 1) {
      return 0;
    }
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = gen_();
    while (x >= limit) {
      x = gen_();
    }
    return static_cast<std::size_t>(x % n);
  }

  /// Standard normal, Box-Muller with a one-value cache.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) {
      u1 = uniform();
    }
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Fisher-Yates shuffle of an index-like container.
  template <typename Vec> void shuffle(Vec &v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF on (0, 1). Acklam's rational approximation
/// polished with one Halley step; absolute error below 1e-14.
double normal_quantile(double p);

/// Inverse CDF of a standard normal truncated to [lo, hi], p in [0, 1].
double truncated_normal_quantile(double p, double lo, double hi);

} // namespace xbar

#endif // XBAR_RNG_HPP
