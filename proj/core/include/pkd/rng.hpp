#pragma once

#include <cstdint>
#include <random>

namespace pkd {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seedable, splittable stream ids. Each recursive construction call
// derives an independent stream from (seed, subtree path) so the tree
// shape is independent of scheduling.
struct StreamId {
  std::uint64_t v = 0;

  StreamId child(std::uint64_t tag) const { return {splitmix64(v) + tag + 1}; }
};

inline std::mt19937_64 make_rng(std::uint64_t seed, StreamId stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream.v)));
}

}  // namespace pkd
