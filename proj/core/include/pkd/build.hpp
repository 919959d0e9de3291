#pragma once

#include <algorithm>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "pkd/config.hpp"
#include "pkd/node.hpp"
#include "pkd/parallel.hpp"
#include "pkd/rng.hpp"
#include "pkd/sieve.hpp"
#include "pkd/skeleton.hpp"

namespace pkd {

template <class Coord, int D>
Box<Coord, D> bounding_box(std::span<const Point<Coord, D>> pts, bool parallel = true) {
  Box<Coord, D> box;
  const std::size_t n = pts.size();
  if (n == 0) return box;
  const std::size_t nblocks = parallel ? std::min<std::size_t>(64, (n + 4095) / 4096) : 1;
  const std::size_t per = (n + nblocks - 1) / nblocks;
  std::vector<Box<Coord, D>> partial(nblocks);
  par_for(0, nblocks, 1, [&](std::size_t b) {
    Box<Coord, D> local;
    for (std::size_t i = b * per; i < std::min(n, (b + 1) * per); ++i) local.extend(pts[i]);
    partial[b] = local;
  });
  for (const auto& p : partial) box.extend(p);
  return box;
}

// count points drawn uniformly with replacement; deterministic given the
// rng state.
template <class Coord, int D>
std::vector<Point<Coord, D>> sample(std::span<const Point<Coord, D>> pts, std::size_t count,
                                    std::mt19937_64& rng) {
  if (pts.empty()) throw std::invalid_argument("cannot sample from empty input");
  std::uniform_int_distribution<std::size_t> dist(0, pts.size() - 1);
  std::vector<Point<Coord, D>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(pts[dist(rng)]);
  return out;
}

namespace detail {

template <class Coord, int D>
bool all_points_equal(std::span<const Point<Coord, D>> pts) {
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i] == pts[0])) return false;
  return true;
}

// Exact-median splitter with the go-right tie rule. The candidate is the
// rank-n/2 coordinate on the widest dimension of the subspace; when ties
// push every point to one side, fall back to the next separating
// coordinate, or to a dimension where the points actually spread.
// Returns nullopt iff all points are identical.
template <class Coord, int D>
std::optional<Splitter<Coord>> choose_median_splitter(std::span<Point<Coord, D>> pts,
                                                      const Box<Coord, D>& box) {
  auto rank_coord = [&](int dim) {
    auto mid = pts.begin() + pts.size() / 2;
    std::nth_element(pts.begin(), mid, pts.end(),
                     [dim](const auto& a, const auto& b) { return a[dim] < b[dim]; });
    return (*mid)[dim];
  };
  auto separates = [&](int dim, Coord x) {
    for (const auto& p : pts)
      if (p[dim] < x) return true;
    return false;
  };
  // Smallest coordinate strictly above x on dim, if any.
  auto next_above = [&](int dim, Coord x) -> std::optional<Coord> {
    std::optional<Coord> best;
    for (const auto& p : pts)
      if (p[dim] > x && (!best || p[dim] < *best)) best = p[dim];
    return best;
  };
  auto try_dim = [&](int dim) -> std::optional<Splitter<Coord>> {
    Coord x = rank_coord(dim);
    if (separates(dim, x)) return Splitter<Coord>{dim, x};
    if (auto up = next_above(dim, x)) return Splitter<Coord>{dim, *up};
    return std::nullopt;  // constant on this dimension
  };
  if (auto s = try_dim(widest_dimension(box))) return s;
  // Try the remaining dimensions widest-first by tight stretch.
  Box<Coord, D> tight = bounding_box<Coord, D>(pts, false);
  std::array<int, D> dims;
  for (int i = 0; i < D; ++i) dims[i] = i;
  std::sort(dims.begin(), dims.end(), [&](int a, int b) {
    return (tight.hi[a] - tight.lo[a]) > (tight.hi[b] - tight.lo[b]);
  });
  for (int dim : dims) {
    if (tight.hi[dim] == tight.lo[dim]) continue;
    if (auto s = try_dim(dim)) return s;
  }
  return std::nullopt;  // all points identical
}

template <class Coord, int D>
Node<Coord, D>* plain_build_rec(std::span<Point<Coord, D>> pts, const Box<Coord, D>& box,
                                const Config& cfg) {
  const std::size_t n = pts.size();
  if (n == 0) return nullptr;
  if (n <= cfg.phi)
    return new LeafNode<Coord, D>(std::vector<Point<Coord, D>>(pts.begin(), pts.end()));
  auto s = choose_median_splitter(pts, box);
  if (!s) return new HeavyLeafNode<Coord, D>(pts[0], n);
  auto split_it = std::partition(pts.begin(), pts.end(), [&](const auto& p) {
    return p[s->dim] < s->coord;
  });
  const std::size_t nl = std::size_t(split_it - pts.begin());
  auto [lbox, rbox] = split_box(box, *s);
  Node<Coord, D>*l, *r;
  par_do([&] { l = plain_build_rec(pts.first(nl), lbox, cfg); },
         [&] { r = plain_build_rec(pts.subspan(nl), rbox, cfg); }, n > cfg.seq_cutoff);
  return new InteriorNode<Coord, D>(*s, l, r);
}

template <class Coord, int D>
Node<Coord, D>* build_rec(std::span<Point<Coord, D>> pts, std::span<Point<Coord, D>> twin,
                          const Box<Coord, D>& box, StreamId stream, const Config& cfg);

// Collapse skeleton entries onto built bucket subtrees; empty buckets
// are pruned and their parents adopt the surviving child.
template <class Coord, int D>
Node<Coord, D>* assemble(const Skeleton<Coord, D>& sk, int e,
                         const std::vector<Node<Coord, D>*>& built) {
  const auto& en = sk.entries[e];
  if (en.is_bucket) return built[en.bucket_lo];
  Node<Coord, D>* l = assemble(sk, en.left, built);
  Node<Coord, D>* r = assemble(sk, en.right, built);
  if (!l) return r;
  if (!r) return l;
  return new InteriorNode<Coord, D>(en.split, l, r);
}

template <class Coord, int D>
Node<Coord, D>* build_rec(std::span<Point<Coord, D>> pts, std::span<Point<Coord, D>> twin,
                          const Box<Coord, D>& box, StreamId stream, const Config& cfg) {
  const std::size_t n = pts.size();
  if (n == 0) return nullptr;
  if (n < cfg.sample_size()) return plain_build_rec(pts, box, cfg);

  auto rng = make_rng(cfg.seed, stream);
  auto samples = sample(std::span<const Point<Coord, D>>(pts), cfg.sample_size(), rng);
  Skeleton<Coord, D> sk = build_skeleton(samples, cfg.lambda, box);
  const bool par = n > cfg.seq_cutoff;
  BucketPartition part =
      sieve(std::span<const Point<Coord, D>>(pts), twin, sk, cfg.chunk_size(), par);

  bool degenerate = false;
  for (int j = 0; j < sk.num_buckets; ++j)
    if (part.bucket_size(j) == n) degenerate = true;
  if (degenerate) {
    // All points fell into one bucket: try one exact-median split before
    // concluding the input is duplicate-only.
    if (all_points_equal(std::span<const Point<Coord, D>>(twin.first(n))))
      return new HeavyLeafNode<Coord, D>(twin[0], n);
    auto s = choose_median_splitter(twin, box);
    auto split_it = std::partition(twin.begin(), twin.end(), [&](const auto& p) {
      return p[s->dim] < s->coord;
    });
    const std::size_t nl = std::size_t(split_it - twin.begin());
    auto [lbox, rbox] = split_box(box, *s);
    Node<Coord, D>*l, *r;
    par_do([&] { l = build_rec(twin.first(nl), pts.first(nl), lbox, stream.child(0), cfg); },
           [&] { r = build_rec(twin.subspan(nl), pts.subspan(nl), rbox, stream.child(1), cfg); },
           par);
    return new InteriorNode<Coord, D>(*s, l, r);
  }

  std::vector<Node<Coord, D>*> built(sk.num_buckets, nullptr);
  // Bucket subspaces for the recursion.
  std::vector<Box<Coord, D>> bucket_box(sk.num_buckets);
  for (const auto& en : sk.entries)
    if (en.is_bucket) bucket_box[en.bucket_lo] = en.box;
  par_for(0, std::size_t(sk.num_buckets), par ? 1 : std::size_t(sk.num_buckets),
          [&](std::size_t j) {
            std::size_t lo = part.offsets[j], hi = part.offsets[j + 1];
            built[j] = build_rec(twin.subspan(lo, hi - lo), pts.subspan(lo, hi - lo),
                                 bucket_box[j], stream.child(j), cfg);
          });
  return assemble(sk, sk.root, built);
}

}  // namespace detail

// Plain construction: one level at a time with exact medians.
template <class Coord, int D>
Node<Coord, D>* plain_build(std::span<Point<Coord, D>> pts, const Config& cfg) {
  cfg.validate();
  if (pts.empty()) return nullptr;
  return detail::plain_build_rec(pts, bounding_box<Coord, D>(pts), cfg);
}

// Sampled multi-level construction: sample, build a lambda-level
// skeleton, sieve into buckets with one round of data movement, recurse
// per bucket in parallel. Falls back to plain construction below
// 2^lambda * sigma points. Deterministic for fixed (input order, cfg).
template <class Coord, int D>
Node<Coord, D>* build(std::vector<Point<Coord, D>>& pts, const Config& cfg,
                      Box<Coord, D>* out_box = nullptr) {
  cfg.validate();
  if (pts.empty()) {
    if (out_box) *out_box = Box<Coord, D>::make_empty();
    return nullptr;
  }
  Box<Coord, D> box = bounding_box<Coord, D>(pts);
  if (out_box) *out_box = box;
  std::vector<Point<Coord, D>> twin(pts.size());
  return detail::build_rec(std::span(pts), std::span(twin), box, StreamId{0}, cfg);
}

}  // namespace pkd
