#pragma once

#include <cstdint>
#include <initializer_list>

namespace mrt {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Combines a master seed with a list of keys into a child seed. Used to derive
/// per-budget, per-replicate and per-order streams so that parallel and serial
/// evaluations consume identical random numbers.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(master ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k));
  return h;
}

/// Counter-based uniform generator: the value at (seed, index, slot) is a pure
/// function of its arguments, so draws can be evaluated in any order.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) noexcept : seed_(mix64(seed)) {}

  constexpr std::uint64_t bits(std::uint64_t index, std::uint64_t slot = 0) const noexcept {
    return mix64(seed_ ^ mix64(index * 0xd1b54a32d192ed03ULL + slot));
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t index, std::uint64_t slot = 0) const noexcept {
    return static_cast<double>(bits(index, slot) >> 11) * 0x1.0p-53;
  }

  /// Uniform on the open interval (0, 1).
  constexpr double open_uniform(std::uint64_t index, std::uint64_t slot = 0) const noexcept {
    return (static_cast<double>(bits(index, slot) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal by Box-Muller on two open uniforms.
  double normal(std::uint64_t index, std::uint64_t slot = 0) const noexcept;

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n, std::uint64_t index, std::uint64_t slot = 0) const noexcept;

  constexpr std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Inverse CDF of U[a, b] at u in [0, 1).
constexpr double uniform_on(double a, double b, double u) noexcept { return a + (b - a) * u; }

}  // namespace mrt
