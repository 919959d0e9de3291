#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "pkd/config.hpp"
#include "pkd/geometry.hpp"
#include "pkd/node.hpp"

namespace pkd {

// Top lambda levels of splitters with externally labeled buckets.
// Construction builds one from samples; updates extract one from the
// first lambda levels of an existing tree. Bucket ids are assigned in
// symmetric (left-to-right) order.
template <class Coord, int D>
struct Skeleton {
  struct Entry {
    bool is_bucket = false;
    Splitter<Coord> split{};          // internal entries only
    int left = -1, right = -1;        // child entry indices
    int bucket_lo = 0, bucket_hi = 0; // bucket id range covered by the entry
    Node<Coord, D>* node = nullptr;   // update path: tree node backing the entry
    Box<Coord, D> box;                // construction path: subspace of the entry
  };

  std::vector<Entry> entries;
  int root = -1;
  int num_buckets = 0;

  int bucket_of(const Entry& e) const { return e.bucket_lo; }

  // Descends by splitter comparisons; equal coordinates go right.
  int locate(const Point<Coord, D>& p) const {
    int e = root;
    while (!entries[e].is_bucket) {
      const Entry& en = entries[e];
      e = (p[en.split.dim] < en.split.coord) ? en.left : en.right;
    }
    return entries[e].bucket_lo;
  }
};

namespace detail {

template <class Coord, int D>
int build_skeleton_rec(Skeleton<Coord, D>& sk, std::span<Point<Coord, D>> samples,
                       int depth, int lambda, const Box<Coord, D>& box) {
  using Entry = typename Skeleton<Coord, D>::Entry;
  if (depth == lambda || samples.empty()) {
    Entry e;
    e.is_bucket = true;
    e.bucket_lo = sk.num_buckets;
    e.bucket_hi = ++sk.num_buckets;
    e.box = box;
    sk.entries.push_back(e);
    return int(sk.entries.size()) - 1;
  }
  int dim = widest_dimension(box);
  auto mid = samples.begin() + samples.size() / 2;
  std::nth_element(samples.begin(), mid, samples.end(),
                   [dim](const auto& a, const auto& b) { return a[dim] < b[dim]; });
  Coord x = (*mid)[dim];
  // Equal coordinates go right, so the left span is strictly smaller.
  auto split_it = std::partition(samples.begin(), samples.end(),
                                 [dim, x](const auto& p) { return p[dim] < x; });
  std::size_t nl = std::size_t(split_it - samples.begin());
  Splitter<Coord> s{dim, x};
  auto [lbox, rbox] = split_box(box, s);
  int l = build_skeleton_rec(sk, samples.first(nl), depth + 1, lambda, lbox);
  int r = build_skeleton_rec(sk, samples.subspan(nl), depth + 1, lambda, rbox);
  Entry e;
  e.split = s;
  e.left = l;
  e.right = r;
  e.bucket_lo = sk.entries[l].bucket_lo;
  e.bucket_hi = sk.entries[r].bucket_hi;
  e.box = box;
  sk.entries.push_back(e);
  return int(sk.entries.size()) - 1;
}

template <class Coord, int D>
int extract_skeleton_rec(Skeleton<Coord, D>& sk, Node<Coord, D>* t, int depth,
                         int lambda) {
  using Entry = typename Skeleton<Coord, D>::Entry;
  if (depth == lambda || t->kind != NodeKind::Interior) {
    Entry e;
    e.is_bucket = true;
    e.bucket_lo = sk.num_buckets;
    e.bucket_hi = ++sk.num_buckets;
    e.node = t;
    sk.entries.push_back(e);
    return int(sk.entries.size()) - 1;
  }
  auto* in = as_interior(t);
  int l = extract_skeleton_rec(sk, in->left, depth + 1, lambda);
  int r = extract_skeleton_rec(sk, in->right, depth + 1, lambda);
  Entry e;
  e.split = in->split;
  e.left = l;
  e.right = r;
  e.bucket_lo = sk.entries[l].bucket_lo;
  e.bucket_hi = sk.entries[r].bucket_hi;
  e.node = t;
  sk.entries.push_back(e);
  return int(sk.entries.size()) - 1;
}

}  // namespace detail

// Splitters come from medians of the samples routed to each entry; the
// splitting dimension is the widest dimension of the entry's subspace.
// Entries that receive no samples become (shallow) buckets.
template <class Coord, int D>
Skeleton<Coord, D> build_skeleton(std::vector<Point<Coord, D>>& samples, int lambda,
                                  const Box<Coord, D>& enclosing) {
  Skeleton<Coord, D> sk;
  sk.root = detail::build_skeleton_rec(sk, std::span(samples), 0, lambda, enclosing);
  return sk;
}

// Frontier subtrees (depth lambda, or shallower leaves) become buckets.
template <class Coord, int D>
Skeleton<Coord, D> extract_skeleton(Node<Coord, D>* tree, int lambda) {
  if (!tree || tree->kind != NodeKind::Interior)
    throw std::invalid_argument("extract_skeleton requires an interior root");
  Skeleton<Coord, D> sk;
  sk.root = detail::extract_skeleton_rec(sk, tree, 0, lambda);
  return sk;
}

}  // namespace pkd
