// SPDX-License-Identifier: Apache-2.0
#include "darklight/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "darklight/error.hpp"

namespace darklight {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw PreconditionError("uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(hi - lo);
  if (span == 0) return lo;
  if (span == UINT64_MAX) return static_cast<std::int64_t>(next_u64());
  const std::uint64_t range = span + 1;
  // Smallest all-ones mask covering range - 1.
  const int bits = 64 - std::countl_zero(span);
  const std::uint64_t mask = bits == 64 ? UINT64_MAX : ((std::uint64_t{1} << bits) - 1);
  for (;;) {
    const std::uint64_t candidate = next_u64() & mask;
    if (candidate < range) return lo + static_cast<std::int64_t>(candidate);
  }
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  double u1 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

}  // namespace darklight
