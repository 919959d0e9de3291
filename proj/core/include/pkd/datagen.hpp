#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "pkd/geometry.hpp"
#include "pkd/parallel.hpp"
#include "pkd/rng.hpp"

namespace pkd {

enum class Distribution { Uniform, Varden };

template <class Coord, int D>
struct GenSpec {
  Distribution dist = Distribution::Uniform;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  Coord lo = 0;
  Coord hi = std::is_integral_v<Coord> ? Coord(1'000'000'000) : Coord(1);
  // Varden: a random walk that restarts from a uniform point with low
  // probability; steps are uniform in [-step, step] per dimension,
  // clamped to bounds. step = width * step_frac.
  double restart_prob = 1e-4;
  double step_frac = 1e-5;

  void validate() const {
    if (lo >= hi) throw std::invalid_argument("bounds must satisfy lo < hi");
    if (restart_prob <= 0.0 || restart_prob >= 1.0)
      throw std::invalid_argument("restart_prob must be in (0, 1)");
    if (step_frac <= 0.0) throw std::invalid_argument("step_frac must be positive");
  }
};

namespace detail {

template <class Coord>
auto coord_dist(Coord lo, Coord hi) {
  if constexpr (std::is_integral_v<Coord>)
    return std::uniform_int_distribution<Coord>(lo, hi);
  else
    return std::uniform_real_distribution<Coord>(lo, hi);
}

template <class Coord, int D>
Point<Coord, D> uniform_point(std::mt19937_64& rng, Coord lo, Coord hi) {
  auto dist = coord_dist(lo, hi);
  Point<Coord, D> p;
  for (int i = 0; i < D; ++i) p[i] = dist(rng);
  return p;
}

}  // namespace detail

// i.i.d. points uniform over the bounds box; chunk-parallel with
// per-chunk derived streams, so output is deterministic per seed and
// independent of thread count.
template <class Coord, int D>
std::vector<Point<Coord, D>> gen_uniform(const GenSpec<Coord, D>& spec) {
  spec.validate();
  std::vector<Point<Coord, D>> out(spec.n);
  constexpr std::size_t kChunk = 1 << 14;
  const std::size_t nchunks = (spec.n + kChunk - 1) / kChunk;
  par_for(0, nchunks, 1, [&](std::size_t c) {
    auto rng = make_rng(spec.seed, StreamId{c});
    for (std::size_t i = c * kChunk; i < std::min(spec.n, (c + 1) * kChunk); ++i)
      out[i] = detail::uniform_point<Coord, D>(rng, spec.lo, spec.hi);
  });
  return out;
}

// Skewed distribution: a single sequential random walk (dense subareas
// far apart), deterministic per seed.
template <class Coord, int D>
std::vector<Point<Coord, D>> gen_varden(const GenSpec<Coord, D>& spec) {
  spec.validate();
  std::vector<Point<Coord, D>> out;
  out.reserve(spec.n);
  auto rng = make_rng(spec.seed, StreamId{0});
  std::bernoulli_distribution restart(spec.restart_prob);
  const double width = double(spec.hi) - double(spec.lo);
  Coord step;
  if constexpr (std::is_integral_v<Coord>)
    step = std::max<Coord>(1, Coord(width * spec.step_frac));
  else
    step = Coord(width * spec.step_frac);
  auto step_dist = detail::coord_dist<Coord>(Coord(-step), step);
  Point<Coord, D> cur{};
  for (std::size_t i = 0; i < spec.n; ++i) {
    if (i == 0 || restart(rng)) {
      cur = detail::uniform_point<Coord, D>(rng, spec.lo, spec.hi);
    } else {
      for (int d = 0; d < D; ++d)
        cur[d] = std::clamp<Coord>(cur[d] + step_dist(rng), spec.lo, spec.hi);
    }
    out.push_back(cur);
  }
  return out;
}

template <class Coord, int D>
std::vector<Point<Coord, D>> generate(const GenSpec<Coord, D>& spec) {
  return spec.dist == Distribution::Uniform ? gen_uniform(spec) : gen_varden(spec);
}

}  // namespace pkd
