#ifndef REINSURE_RANDOM_HPP
#define REINSURE_RANDOM_HPP

#include <cstdint>

namespace reinsure {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of path `index` under master seed `master`: mix64(master ^ mix64(index)).
/// Streams depend only on (master, index), never on thread layout.
constexpr std::uint64_t path_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index));
}

}  // namespace reinsure

#endif  // REINSURE_RANDOM_HPP
