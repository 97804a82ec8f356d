#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace lpra {

/// Deterministic counter-based generator (SplitMix64 core).
///
/// Identical seed + identical call sequence produces an identical stream on
/// every platform; std:: distributions are avoided on purpose since their
/// output is implementation-defined. Independent named substreams come from
/// fork(), so sub-algorithms cannot perturb each other's draws.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1); safe as a log/tan argument.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    // Rejection-free modulo is fine here: n is tiny relative to 2^64.
    return next_u64() % n;
  }

  /// Standard normal via Box-Muller (both values consumed, one cached).
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  double exponential() { return -std::log(uniform_open()); }

  /// Derives an independent substream. Consumes one step of this generator,
  /// so repeated forks with the same name yield distinct streams.
  SeededRng fork(std::string_view name) {
    std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
    for (char c : name) {
      h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
      h *= 0x100000001B3ULL;
    }
    return SeededRng(next_u64() ^ h);
  }

  SeededRng fork(std::uint64_t tag) {
    std::uint64_t z = tag + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return SeededRng(next_u64() ^ z ^ (z >> 31));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace lpra
