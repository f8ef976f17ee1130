#include "mrt/random.hpp"

#include <cmath>
#include <numbers>

namespace mrt {

double CounterRng::normal(std::uint64_t index, std::uint64_t slot) const noexcept {
  const double u1 = open_uniform(index, 2 * slot);
  const double u2 = open_uniform(index, 2 * slot + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t n, std::uint64_t index,
                                std::uint64_t slot) const noexcept {
  // Multiply-shift; bias is below 2^-64 * n.
  __extension__ using u128 = unsigned __int128;
  const u128 wide = static_cast<u128>(bits(index, slot)) * static_cast<u128>(n);
  return static_cast<std::uint64_t>(wide >> 64);
}

}  // namespace mrt
