#pragma once

#include <cstdint>
#include <initializer_list>

namespace wbary {

/// SplitMix64 (Steele, Lea & Flood 2014; constants as published by Vigna).
/// 64-bit state, one add and a three-stage xor-shift-multiply mix per draw.
/// All derived quantities below are defined bit-for-bit so that a seeded
/// stream is reproducible in any language.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1): top 53 bits scaled by 2^-53.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) as floor(uniform() * n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Standard normal via Box-Muller using two uniforms; no cached spare.
  double normal() noexcept;

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// Derives an independent stream seed from a master seed and a list of
/// integer tags (replication index, measure index, ...).
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) noexcept;

}  // namespace wbary
