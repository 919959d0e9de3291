#pragma once

#include <algorithm>
#include <vector>

#include "pkd/pkd.hpp"

namespace pkd::testing {

template <class T>
bool multiset_eq(std::vector<T> a, std::vector<T> b) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

// Distances only; tie points are implementation-chosen.
template <class Entry>
std::vector<typename Entry::first_type> distances(const std::vector<Entry>& entries) {
  std::vector<typename Entry::first_type> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.first);
  return out;
}

template <class Coord, int D>
std::vector<Point<Coord, D>> uniform_points(std::size_t n, std::uint64_t seed,
                                            Coord lo = 0, Coord hi = 1'000'000'000) {
  GenSpec<Coord, D> spec;
  spec.n = n;
  spec.seed = seed;
  spec.lo = lo;
  spec.hi = hi;
  return gen_uniform(spec);
}

template <class Coord, int D>
std::vector<Point<Coord, D>> varden_points(std::size_t n, std::uint64_t seed) {
  GenSpec<Coord, D> spec;
  spec.dist = Distribution::Varden;
  spec.n = n;
  spec.seed = seed;
  return gen_varden(spec);
}

}  // namespace pkd::testing
