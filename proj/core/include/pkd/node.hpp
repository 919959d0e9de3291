#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "pkd/geometry.hpp"
#include "pkd/parallel.hpp"

namespace pkd {

enum class NodeKind : std::uint8_t { Interior, Leaf, Heavy };

// Interior nodes store only the splitter, the subtree size and the two
// children; no bounding boxes. A heavy leaf stores one coordinate tuple
// plus its multiplicity (size).
template <class Coord, int D>
struct Node {
  NodeKind kind;
  std::size_t size;

 protected:
  Node(NodeKind k, std::size_t s) : kind(k), size(s) {}
};

template <class Coord, int D>
struct InteriorNode : Node<Coord, D> {
  Splitter<Coord> split;
  Node<Coord, D>* left;
  Node<Coord, D>* right;

  InteriorNode(Splitter<Coord> s, Node<Coord, D>* l, Node<Coord, D>* r)
      : Node<Coord, D>(NodeKind::Interior, l->size + r->size), split(s), left(l), right(r) {}
};

template <class Coord, int D>
struct LeafNode : Node<Coord, D> {
  std::vector<Point<Coord, D>> pts;

  explicit LeafNode(std::vector<Point<Coord, D>> p)
      : Node<Coord, D>(NodeKind::Leaf, p.size()), pts(std::move(p)) {}
};

template <class Coord, int D>
struct HeavyLeafNode : Node<Coord, D> {
  Point<Coord, D> pt;

  HeavyLeafNode(const Point<Coord, D>& p, std::size_t count)
      : Node<Coord, D>(NodeKind::Heavy, count), pt(p) {}
};

template <class Coord, int D>
InteriorNode<Coord, D>* as_interior(Node<Coord, D>* n) {
  return static_cast<InteriorNode<Coord, D>*>(n);
}
template <class Coord, int D>
const InteriorNode<Coord, D>* as_interior(const Node<Coord, D>* n) {
  return static_cast<const InteriorNode<Coord, D>*>(n);
}
template <class Coord, int D>
LeafNode<Coord, D>* as_leaf(Node<Coord, D>* n) {
  return static_cast<LeafNode<Coord, D>*>(n);
}
template <class Coord, int D>
const LeafNode<Coord, D>* as_leaf(const Node<Coord, D>* n) {
  return static_cast<const LeafNode<Coord, D>*>(n);
}
template <class Coord, int D>
HeavyLeafNode<Coord, D>* as_heavy(Node<Coord, D>* n) {
  return static_cast<HeavyLeafNode<Coord, D>*>(n);
}
template <class Coord, int D>
const HeavyLeafNode<Coord, D>* as_heavy(const Node<Coord, D>* n) {
  return static_cast<const HeavyLeafNode<Coord, D>*>(n);
}

template <class Coord, int D>
std::size_t subtree_size(const Node<Coord, D>* n) {
  return n ? n->size : 0;
}

template <class Coord, int D>
void destroy_tree(Node<Coord, D>* n, std::size_t par_cutoff = 4096) {
  if (!n) return;
  if (n->kind == NodeKind::Interior) {
    auto* in = as_interior(n);
    par_do([&] { destroy_tree(in->left, par_cutoff); },
           [&] { destroy_tree(in->right, par_cutoff); }, n->size > par_cutoff);
    delete in;
  } else if (n->kind == NodeKind::Leaf) {
    delete as_leaf(n);
  } else {
    delete as_heavy(n);
  }
}

template <class Coord, int D>
Node<Coord, D>* clone_tree(const Node<Coord, D>* n, std::size_t par_cutoff = 4096) {
  if (!n) return nullptr;
  switch (n->kind) {
    case NodeKind::Leaf:
      return new LeafNode<Coord, D>(as_leaf(n)->pts);
    case NodeKind::Heavy:
      return new HeavyLeafNode<Coord, D>(as_heavy(n)->pt, n->size);
    case NodeKind::Interior: {
      const auto* in = as_interior(n);
      Node<Coord, D>*l, *r;
      par_do([&] { l = clone_tree(in->left, par_cutoff); },
             [&] { r = clone_tree(in->right, par_cutoff); }, n->size > par_cutoff);
      return new InteriorNode<Coord, D>(in->split, l, r);
    }
  }
  return nullptr;
}

template <class Coord, int D>
std::size_t tree_height(const Node<Coord, D>* n) {
  if (!n) return 0;
  if (n->kind != NodeKind::Interior) return 1;
  const auto* in = as_interior(n);
  return 1 + std::max(tree_height(in->left), tree_height(in->right));
}

template <class Coord, int D>
std::size_t count_nodes(const Node<Coord, D>* n) {
  if (!n) return 0;
  if (n->kind != NodeKind::Interior) return 1;
  const auto* in = as_interior(n);
  return 1 + count_nodes(in->left) + count_nodes(in->right);
}

// Writes all points of the subtree into out (heavy leaves expanded),
// symmetric order, out must have room for n->size points.
template <class Coord, int D>
void flatten_into(const Node<Coord, D>* n, Point<Coord, D>* out,
                  std::size_t par_cutoff = 4096) {
  if (!n) return;
  switch (n->kind) {
    case NodeKind::Leaf: {
      const auto& pts = as_leaf(n)->pts;
      std::copy(pts.begin(), pts.end(), out);
      return;
    }
    case NodeKind::Heavy: {
      std::fill(out, out + n->size, as_heavy(n)->pt);
      return;
    }
    case NodeKind::Interior: {
      const auto* in = as_interior(n);
      par_do([&] { flatten_into(in->left, out, par_cutoff); },
             [&] { flatten_into(in->right, out + subtree_size(in->left), par_cutoff); },
             n->size > par_cutoff);
      return;
    }
  }
}

template <class Coord, int D>
std::vector<Point<Coord, D>> flatten(const Node<Coord, D>* n) {
  std::vector<Point<Coord, D>> out(subtree_size(n));
  flatten_into(n, out.data());
  return out;
}

namespace detail {
inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}
template <class Coord>
std::uint64_t coord_bits(Coord c) {
  if constexpr (sizeof(Coord) == 8) {
    std::uint64_t b;
    __builtin_memcpy(&b, &c, 8);
    return b;
  } else {
    return std::uint64_t(c);
  }
}
}  // namespace detail

// Structural fingerprint used by the determinism checks.
template <class Coord, int D>
std::uint64_t structure_hash(const Node<Coord, D>* n) {
  if (!n) return 0x5c5c5c5cULL;
  std::uint64_t h = detail::hash_combine(std::uint64_t(n->kind), n->size);
  switch (n->kind) {
    case NodeKind::Leaf:
      for (const auto& p : as_leaf(n)->pts)
        for (int i = 0; i < D; ++i) h = detail::hash_combine(h, detail::coord_bits(p[i]));
      break;
    case NodeKind::Heavy:
      for (int i = 0; i < D; ++i)
        h = detail::hash_combine(h, detail::coord_bits(as_heavy(n)->pt[i]));
      break;
    case NodeKind::Interior: {
      const auto* in = as_interior(n);
      h = detail::hash_combine(h, std::uint64_t(in->split.dim));
      h = detail::hash_combine(h, detail::coord_bits(in->split.coord));
      h = detail::hash_combine(h, structure_hash(in->left));
      h = detail::hash_combine(h, structure_hash(in->right));
      break;
    }
  }
  return h;
}

}  // namespace pkd
