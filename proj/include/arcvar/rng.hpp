#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace arcvar {

/// Generator used for every stochastic routine. Each replication, target and
/// simulation owns its own instance seeded through derive_seed().
using Rng = std::mt19937_64;

/// Recorded in report metadata so that runs can be reproduced.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64; seeds derived by splitmix64 chaining";

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Hash of (master, path...) used as an independent stream seed.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t component : path) h = splitmix64(h ^ splitmix64(component));
  return h;
}

}  // namespace arcvar
