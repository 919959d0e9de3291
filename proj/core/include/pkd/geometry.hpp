#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <type_traits>

namespace pkd {

// Squared distances accumulate in a width that cannot overflow for the
// instantiated coordinate type: 128-bit for 64-bit integers, native
// width for reals.
template <class Coord>
struct DistanceTraits {
  using type = std::conditional_t<std::is_integral_v<Coord>, __int128, Coord>;
};
template <class Coord>
using dist_t = typename DistanceTraits<Coord>::type;

template <class Coord, int D>
struct Point {
  static_assert(D >= 1);
  std::array<Coord, D> c{};

  Coord& operator[](int i) { return c[i]; }
  const Coord& operator[](int i) const { return c[i]; }
  friend bool operator==(const Point&, const Point&) = default;
  // Lexicographic; used by the oracle and multiset bookkeeping.
  friend bool operator<(const Point& a, const Point& b) { return a.c < b.c; }
};

template <class Coord>
struct Splitter {
  int dim = 0;
  Coord coord{};
  friend bool operator==(const Splitter&, const Splitter&) = default;
};

template <class Coord, int D>
dist_t<Coord> squared_distance(const Point<Coord, D>& p, const Point<Coord, D>& q) {
  dist_t<Coord> acc = 0;
  for (int i = 0; i < D; ++i) {
    dist_t<Coord> d = dist_t<Coord>(p[i]) - dist_t<Coord>(q[i]);
    acc += d * d;
  }
  return acc;
}

// numeric_limits is not specialized for __int128 in strict mode.
template <class T>
constexpr T dist_max() {
  if constexpr (std::is_same_v<T, __int128>)
    return T((unsigned __int128)-1 >> 1);
  else
    return std::numeric_limits<T>::max();
}

enum class BoxRel { Disjoint, Intersects, Contained };

// Axis-aligned box, closed on both ends. Empty boxes carry an explicit
// flag; bounds of an empty box are meaningless and never read.
template <class Coord, int D>
struct Box {
  Point<Coord, D> lo{};
  Point<Coord, D> hi{};
  bool empty = true;

  Box() = default;
  Box(const Point<Coord, D>& l, const Point<Coord, D>& h) : lo(l), hi(h), empty(false) {
    for (int i = 0; i < D; ++i)
      if (l[i] > h[i]) { empty = true; break; }
  }

  static Box make_empty() { return Box(); }

  bool contains(const Point<Coord, D>& p) const {
    if (empty) return false;
    for (int i = 0; i < D; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }

  void extend(const Point<Coord, D>& p) {
    if (empty) {
      lo = hi = p;
      empty = false;
      return;
    }
    for (int i = 0; i < D; ++i) {
      if (p[i] < lo[i]) lo[i] = p[i];
      if (p[i] > hi[i]) hi[i] = p[i];
    }
  }

  void extend(const Box& b) {
    if (b.empty) return;
    extend(b.lo);
    extend(b.hi);
  }

  friend bool operator==(const Box& a, const Box& b) {
    if (a.empty || b.empty) return a.empty == b.empty;
    return a.lo == b.lo && a.hi == b.hi;
  }
};

template <class Coord, int D>
int widest_dimension(const Box<Coord, D>& box) {
  if (box.empty) throw std::invalid_argument("degenerate box");
  int best = 0;
  Coord stretch = box.hi[0] - box.lo[0];
  for (int i = 1; i < D; ++i) {
    Coord s = box.hi[i] - box.lo[i];
    if (s > stretch) {
      stretch = s;
      best = i;
    }
  }
  return best;
}

// Subspaces are computed on the fly during queries instead of storing
// per-node bounding boxes. A splitter coordinate outside the box leaves
// one side empty.
template <class Coord, int D>
std::pair<Box<Coord, D>, Box<Coord, D>> split_box(const Box<Coord, D>& box,
                                                  const Splitter<Coord>& s) {
  if (box.empty) throw std::invalid_argument("degenerate box");
  Box<Coord, D> left = box, right = box;
  left.hi[s.dim] = std::min(box.hi[s.dim], s.coord);
  right.lo[s.dim] = std::max(box.lo[s.dim], s.coord);
  if (left.lo[s.dim] > left.hi[s.dim]) left = Box<Coord, D>::make_empty();
  if (right.lo[s.dim] > right.hi[s.dim]) right = Box<Coord, D>::make_empty();
  return {left, right};
}

template <class Coord, int D>
BoxRel box_relation(const Box<Coord, D>& node_box, const Box<Coord, D>& query_box) {
  if (node_box.empty) return BoxRel::Disjoint;
  bool contained = true;
  for (int i = 0; i < D; ++i) {
    if (node_box.lo[i] > query_box.hi[i] || node_box.hi[i] < query_box.lo[i])
      return BoxRel::Disjoint;
    if (node_box.lo[i] < query_box.lo[i] || node_box.hi[i] > query_box.hi[i])
      contained = false;
  }
  return contained ? BoxRel::Contained : BoxRel::Intersects;
}

// Smallest squared distance from q to any point of the box.
template <class Coord, int D>
dist_t<Coord> box_squared_distance(const Box<Coord, D>& box, const Point<Coord, D>& q) {
  if (box.empty) return dist_max<dist_t<Coord>>();
  dist_t<Coord> acc = 0;
  for (int i = 0; i < D; ++i) {
    dist_t<Coord> d = 0;
    if (q[i] < box.lo[i])
      d = dist_t<Coord>(box.lo[i]) - dist_t<Coord>(q[i]);
    else if (q[i] > box.hi[i])
      d = dist_t<Coord>(q[i]) - dist_t<Coord>(box.hi[i]);
    acc += d * d;
  }
  return acc;
}

}  // namespace pkd
