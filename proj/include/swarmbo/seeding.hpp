#pragma once

#include <cstdint>
#include <initializer_list>

namespace swarmbo {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a master seed and a path of
/// integer tags (trial index, maze id, epoch, ...).
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(master);
  for (auto t : tags)
    h = mix64(h ^ mix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

// Tags keep the seed families for different purposes disjoint.
enum class SeedTag : std::uint64_t {
  Trial = 1,
  InitialDesign = 2,
  Fit = 3,
  Acquisition = 4,
  Export = 5,
  Anticipate = 6,
};

constexpr std::uint64_t tag(SeedTag t) { return static_cast<std::uint64_t>(t); }

}  // namespace swarmbo
