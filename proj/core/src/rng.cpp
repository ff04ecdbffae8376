#include "wbary/rng.hpp"

#include <cmath>
#include <numbers>

namespace wbary {

std::uint64_t SplitMix64::below(std::uint64_t n) noexcept {
  auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return k < n ? k : n - 1;
}

double SplitMix64::normal() noexcept {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) noexcept {
  SplitMix64 mix(master);
  std::uint64_t h = mix.next();
  for (std::uint64_t t : tags) {
    SplitMix64 step(h ^ (t + 0x632BE59BD9B4E019ULL));
    h = step.next();
  }
  return h;
}

}  // namespace wbary
