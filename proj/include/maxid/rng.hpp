#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace maxid {

// Counter-based 64-bit generator (SplitMix64 output function over an
// incrementing counter).  Every sampling operation derives its own stream
// from (seed, tag), so replicates are reproducible bit-exactly regardless
// of how the work is split across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t hash_tag(std::string_view tag) {
    // FNV-1a
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  // Stream derivation: derive(seed, tag) and derive(seed, tag, k) give
  // independent streams for distinct (tag, k).
  static Rng derive(std::uint64_t seed, std::string_view tag,
                    std::uint64_t k = 0) {
    return Rng(mix(seed ^ hash_tag(tag)) ^ mix(k ^ 0x5851f42d4c957f2dULL));
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0,1); never returns 0 or 1.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double exponential() { return -std::log(uniform()); }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(6.283185307179586476925287 * u2);
    have_cached_ = true;
    return r * std::cos(6.283185307179586476925287 * u2);
  }

  // Exact Poisson sampling via cumulative exponential gaps; O(mean).
  std::uint64_t poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
      throw std::invalid_argument("poisson: mean must be finite and >= 0");
    std::uint64_t n = 0;
    double acc = exponential();
    while (acc < mean) {
      ++n;
      acc += exponential();
    }
    return n;
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace maxid
