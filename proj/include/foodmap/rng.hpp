#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace foodmap {

// splitmix64 step; used for seed mixing and the duplicate jitter.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t hash64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline double u64_to_unit(std::uint64_t v) {
  return static_cast<double>(v >> 11) * 0x1.0p-53;  // [0, 1)
}

// Deterministic random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; all transforms are implemented here
// rather than with std::*_distribution so that generated artifacts are stable
// across standard libraries.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform() { return u64_to_unit(engine_()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, cosine branch only.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Knuth inversion for small means, normal approximation above it.
  long poisson(double lambda) {
    if (lambda <= 0) return 0;
    if (lambda <= 30.0) {
      const double limit = std::exp(-lambda);
      long k = 0;
      double prod = uniform();
      while (prod > limit) {
        ++k;
        prod *= uniform();
      }
      return k;
    }
    const long k = std::lround(normal(lambda, std::sqrt(lambda)));
    return k < 0 ? 0 : k;
  }

  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return n == 0 ? 0 : static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace foodmap
