#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pkd/geometry.hpp"
#include "pkd/node.hpp"
#include "pkd/parallel.hpp"

namespace pkd {

// Bounded max-heap over (squared distance, point). Holds at most k
// entries; when full, an insert is accepted only if strictly smaller
// than the current maximum, which is evicted.
template <class Coord, int D>
class KnnBuffer {
 public:
  using Dist = dist_t<Coord>;
  using Entry = std::pair<Dist, Point<Coord, D>>;

  explicit KnnBuffer(std::size_t k) : k_(k) { heap_.reserve(k); }

  bool full() const { return heap_.size() == k_; }
  std::size_t size() const { return heap_.size(); }

  // Largest accepted distance, or the type maximum while not full.
  Dist worst() const { return full() ? heap_.front().first : dist_max<Dist>(); }

  void push(Dist d, const Point<Coord, D>& p) {
    if (heap_.size() < k_) {
      heap_.emplace_back(d, p);
      std::push_heap(heap_.begin(), heap_.end(), cmp);
    } else if (d < heap_.front().first) {
      std::pop_heap(heap_.begin(), heap_.end(), cmp);
      heap_.back() = {d, p};
      std::push_heap(heap_.begin(), heap_.end(), cmp);
    }
  }

  std::vector<Entry> take_sorted() {
    std::sort(heap_.begin(), heap_.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    return std::move(heap_);
  }

 private:
  static bool cmp(const Entry& a, const Entry& b) { return a.first < b.first; }
  std::size_t k_;
  std::vector<Entry> heap_;
};

namespace detail {

template <class Coord, int D>
void knn_rec(const Node<Coord, D>* n, const Box<Coord, D>& box, const Point<Coord, D>& q,
             KnnBuffer<Coord, D>& buf, bool prune) {
  switch (n->kind) {
    case NodeKind::Leaf:
      for (const auto& p : as_leaf(n)->pts) buf.push(squared_distance(p, q), p);
      return;
    case NodeKind::Heavy: {
      const auto& p = as_heavy(n)->pt;
      const auto d = squared_distance(p, q);
      // Contributes up to min(k, multiplicity) copies.
      for (std::size_t i = 0; i < n->size; ++i) {
        if (buf.full() && !(d < buf.worst())) break;
        buf.push(d, p);
      }
      return;
    }
    case NodeKind::Interior: {
      const auto* in = as_interior(n);
      auto [lbox, rbox] = split_box(box, in->split);
      const bool left_first = q[in->split.dim] < in->split.coord;
      const Node<Coord, D>* near = left_first ? in->left : in->right;
      const Node<Coord, D>* far = left_first ? in->right : in->left;
      const Box<Coord, D>& nbox = left_first ? lbox : rbox;
      const Box<Coord, D>& fbox = left_first ? rbox : lbox;
      if (!prune || !nbox.empty) knn_rec(near, nbox, q, buf, prune);
      if (!prune || !buf.full() || box_squared_distance(fbox, q) < buf.worst())
        knn_rec(far, fbox, q, buf, prune);
      return;
    }
  }
}

}  // namespace detail

// Returns the min(k, n) nearest stored points with exact squared
// distances, ascending. Descends toward the query side first and prunes
// the far child by the distance to its on-the-fly subspace.
template <class Coord, int D>
std::vector<typename KnnBuffer<Coord, D>::Entry> knn(const Node<Coord, D>* tree,
                                                     const Box<Coord, D>& root_box,
                                                     const Point<Coord, D>& q,
                                                     std::size_t k, bool prune = true) {
  if (k == 0) throw std::invalid_argument("knn requires k >= 1");
  if (!tree) return {};
  KnnBuffer<Coord, D> buf(std::min(k, tree->size));
  detail::knn_rec(tree, root_box, q, buf, prune);
  return buf.take_sorted();
}

// Number of stored points (with multiplicity) in the closed box.
// Contained subspaces contribute their stored size without descending.
template <class Coord, int D>
std::size_t range_count(const Node<Coord, D>* n, const Box<Coord, D>& node_box,
                        const Box<Coord, D>& query, bool prune = true) {
  if (!n || query.empty) return 0;
  if (prune) {
    switch (box_relation(node_box, query)) {
      case BoxRel::Disjoint: return 0;
      case BoxRel::Contained: return n->size;
      case BoxRel::Intersects: break;
    }
  }
  switch (n->kind) {
    case NodeKind::Leaf: {
      std::size_t c = 0;
      for (const auto& p : as_leaf(n)->pts) c += query.contains(p);
      return c;
    }
    case NodeKind::Heavy:
      return query.contains(as_heavy(n)->pt) ? n->size : 0;
    case NodeKind::Interior: {
      const auto* in = as_interior(n);
      auto [lbox, rbox] = split_box(node_box, in->split);
      return range_count(in->left, lbox, query, prune) +
             range_count(in->right, rbox, query, prune);
    }
  }
  return 0;
}

namespace detail {

template <class Coord, int D>
void report_rec(const Node<Coord, D>* n, const Box<Coord, D>& node_box,
                const Box<Coord, D>& query, Point<Coord, D>* out, std::size_t& cursor,
                TaskGroup& tg, bool prune) {
  switch (box_relation(node_box, query)) {
    case BoxRel::Disjoint:
      if (prune) return;
      break;
    case BoxRel::Contained:
      if (prune) {
        // Fully covered subtree: flatten in parallel into its own slice.
        Point<Coord, D>* slot = out + cursor;
        cursor += n->size;
        const Node<Coord, D>* sub = n;
        tg.run([sub, slot] { flatten_into(sub, slot); });
        return;
      }
      break;
    case BoxRel::Intersects:
      break;
  }
  switch (n->kind) {
    case NodeKind::Leaf:
      for (const auto& p : as_leaf(n)->pts)
        if (query.contains(p)) out[cursor++] = p;
      return;
    case NodeKind::Heavy: {
      const auto& p = as_heavy(n)->pt;
      if (query.contains(p)) {
        std::fill(out + cursor, out + cursor + n->size, p);
        cursor += n->size;
      }
      return;
    }
    case NodeKind::Interior: {
      const auto* in = as_interior(n);
      auto [lbox, rbox] = split_box(node_box, in->split);
      report_rec(in->left, lbox, query, out, cursor, tg, prune);
      report_rec(in->right, rbox, query, out, cursor, tg, prune);
      return;
    }
  }
}

}  // namespace detail

// All stored points inside the closed box (with multiplicity),
// unordered. Contained subtrees are flattened in parallel into disjoint
// output slices.
template <class Coord, int D>
std::vector<Point<Coord, D>> range_report(const Node<Coord, D>* tree,
                                          const Box<Coord, D>& root_box,
                                          const Box<Coord, D>& query, bool prune = true) {
  std::vector<Point<Coord, D>> out;
  if (!tree || query.empty) return out;
  out.resize(range_count(tree, root_box, query));
  std::size_t cursor = 0;
  TaskGroup tg;
  detail::report_rec(tree, root_box, query, out.data(), cursor, tg, prune);
  tg.wait();
  return out;
}

}  // namespace pkd
