#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pkd/build.hpp"
#include "pkd/config.hpp"
#include "pkd/node.hpp"
#include "pkd/parallel.hpp"
#include "pkd/rng.hpp"
#include "pkd/sieve.hpp"
#include "pkd/skeleton.hpp"

namespace pkd {

// Exact integer evaluation of (0.5 - a) * total <= left <= (0.5 + a) * total.
// alpha is taken at microunit resolution so the comparison never rounds.
inline bool is_balanced(std::size_t left_size, std::size_t total, double alpha) {
  const std::int64_t a = std::llround(alpha * 1e6);
  const __int128 scaled_left = __int128(left_size) * 1'000'000;
  return __int128(500'000 - a) * total <= scaled_left &&
         scaled_left <= __int128(500'000 + a) * total;
}

// Subtrees at or below the leaf wrap are never rebuilt for balance.
struct BalancePredicate {
  double alpha;
  std::size_t phi;

  bool operator()(std::size_t left_size, std::size_t total) const {
    return total <= phi || is_balanced(left_size, total, alpha);
  }
};

// Imbalance-triggered partial reconstructions, accumulated across one
// batch operation (leaf-local rebuilds are not counted).
struct UpdateStats {
  std::atomic<std::size_t> rebuild_count{0};
  std::atomic<std::size_t> rebuild_points{0};  // points in rebuilt subtrees
  std::atomic<std::size_t> rebuild_nodes{0};   // nodes of the rebuilt subtrees

  void reset() {
    rebuild_count = 0;
    rebuild_points = 0;
    rebuild_nodes = 0;
  }
};

namespace detail {

template <class Coord, int D>
Node<Coord, D>* rebuild_with(Node<Coord, D>* t, std::span<const Point<Coord, D>> extra,
                             StreamId stream, const Config& cfg, UpdateStats& stats) {
  const std::size_t total = subtree_size(t) + extra.size();
  std::vector<Point<Coord, D>> pts(total);
  flatten_into(t, pts.data());
  std::copy(extra.begin(), extra.end(), pts.data() + subtree_size(t));
  destroy_tree(t);
  std::vector<Point<Coord, D>> twin(total);
  Node<Coord, D>* built = build_rec(std::span(pts), std::span(twin),
                                    bounding_box<Coord, D>(pts), stream, cfg);
  stats.rebuild_count++;
  stats.rebuild_points += total;
  stats.rebuild_nodes += count_nodes(built);
  return built;
}

template <class Coord, int D>
Node<Coord, D>* batch_insert_node(Node<Coord, D>* t, std::span<Point<Coord, D>> batch,
                                  std::span<Point<Coord, D>> twin, StreamId stream,
                                  const Config& cfg, UpdateStats& stats);

template <class Coord, int D>
Node<Coord, D>* insert_to_skeleton(const Skeleton<Coord, D>& sk, int e,
                                   const BucketPartition& part,
                                   std::span<Point<Coord, D>> sieved,
                                   std::span<Point<Coord, D>> scratch, StreamId stream,
                                   const Config& cfg, UpdateStats& stats) {
  const auto& en = sk.entries[e];
  if (en.is_bucket) {
    const int b = en.bucket_lo;
    const std::size_t lo = part.offsets[b], hi = part.offsets[b + 1];
    return batch_insert_node(en.node, sieved.subspan(lo, hi - lo),
                             scratch.subspan(lo, hi - lo), stream.child(b), cfg, stats);
  }
  auto* node = as_interior(en.node);
  const auto& le = sk.entries[en.left];
  const std::size_t added = part.range_size(en.bucket_lo, en.bucket_hi);
  const std::size_t added_left = part.range_size(le.bucket_lo, le.bucket_hi);
  const std::size_t new_total = node->size + added;
  const std::size_t new_left = subtree_size(node->left) + added_left;
  BalancePredicate balanced{cfg.alpha, cfg.phi};
  if (!balanced(new_left, new_total)) {
    const std::size_t lo = part.offsets[en.bucket_lo], hi = part.offsets[en.bucket_hi];
    return rebuild_with(static_cast<Node<Coord, D>*>(node),
                        std::span<const Point<Coord, D>>(sieved.subspan(lo, hi - lo)),
                        stream.child(std::size_t(en.bucket_lo) | (std::size_t(1) << 32)),
                        cfg, stats);
  }
  Node<Coord, D>*l, *r;
  par_do(
      [&] {
        l = insert_to_skeleton(sk, en.left, part, sieved, scratch, stream, cfg, stats);
      },
      [&] {
        r = insert_to_skeleton(sk, en.right, part, sieved, scratch, stream, cfg, stats);
      },
      added > cfg.seq_cutoff);
  node->left = l;
  node->right = r;
  node->size = new_total;
  return node;
}

template <class Coord, int D>
Node<Coord, D>* batch_insert_node(Node<Coord, D>* t, std::span<Point<Coord, D>> batch,
                                  std::span<Point<Coord, D>> twin, StreamId stream,
                                  const Config& cfg, UpdateStats& stats) {
  if (batch.empty()) return t;
  if (!t)
    return build_rec(batch, twin, bounding_box<Coord, D>(batch), stream, cfg);
  if (t->kind != NodeKind::Interior) {
    // Leaf target: local rebuild from leaf + batch (not counted as an
    // imbalance rebuild).
    const std::size_t total = t->size + batch.size();
    std::vector<Point<Coord, D>> pts(total);
    flatten_into(t, pts.data());
    std::copy(batch.begin(), batch.end(), pts.data() + t->size);
    destroy_tree(t);
    std::vector<Point<Coord, D>> aux(total);
    return build_rec(std::span(pts), std::span(aux), bounding_box<Coord, D>(pts),
                     stream, cfg);
  }
  Skeleton<Coord, D> sk = extract_skeleton(t, cfg.lambda);
  BucketPartition part = sieve(std::span<const Point<Coord, D>>(batch), twin, sk,
                               cfg.chunk_size(), batch.size() > cfg.seq_cutoff);
  return insert_to_skeleton(sk, sk.root, part, twin, batch, stream, cfg, stats);
}

}  // namespace detail

// Inserts the batch (multiset union). Descends the top-lambda skeleton
// with exact post-insert sizes computed from the sieve's bucket counts;
// a subtree that would become unbalanced is flattened together with its
// incident batch points and rebuilt. Takes ownership of `tree`.
template <class Coord, int D>
Node<Coord, D>* batch_insert(Node<Coord, D>* tree, std::vector<Point<Coord, D>> batch,
                             const Config& cfg, UpdateStats& stats,
                             StreamId stream = StreamId{1}) {
  cfg.validate();
  if (batch.empty()) return tree;
  std::vector<Point<Coord, D>> twin(batch.size());
  return detail::batch_insert_node(tree, std::span(batch), std::span(twin), stream, cfg,
                                   stats);
}

namespace detail {

// Round-1 result: exact removal counts per traversed node, plus the
// batch subdivision sizes so round 2 can replay the routing.
struct DeletePlan {
  std::size_t removed = 0;
  std::size_t left_batch = 0;  // interior: batch points routed left
  std::unique_ptr<DeletePlan> left, right;
};

template <class Coord, int D>
std::size_t matched_in_leaf(const LeafNode<Coord, D>* leaf,
                            std::span<Point<Coord, D>> batch) {
  // Multiset intersection size between the leaf contents and the batch.
  std::vector<Point<Coord, D>> a(leaf->pts), b(batch.begin(), batch.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<Point<Coord, D>> inter;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(inter));
  return inter.size();
}

template <class Coord, int D>
std::unique_ptr<DeletePlan> plan_delete(const Node<Coord, D>* t,
                                        std::span<Point<Coord, D>> batch,
                                        const Config& cfg) {
  auto plan = std::make_unique<DeletePlan>();
  if (!t || batch.empty()) return plan;
  switch (t->kind) {
    case NodeKind::Leaf:
      plan->removed = matched_in_leaf(as_leaf(t), batch);
      return plan;
    case NodeKind::Heavy: {
      const auto& p = as_heavy(t)->pt;
      std::size_t hits = std::size_t(std::count(batch.begin(), batch.end(), p));
      plan->removed = std::min(hits, t->size);
      return plan;
    }
    case NodeKind::Interior: {
      const auto* in = as_interior(t);
      const auto s = in->split;
      auto split_it = std::partition(batch.begin(), batch.end(), [&](const auto& p) {
        return p[s.dim] < s.coord;
      });
      plan->left_batch = std::size_t(split_it - batch.begin());
      par_do(
          [&] { plan->left = plan_delete(in->left, batch.first(plan->left_batch), cfg); },
          [&] {
            plan->right = plan_delete(in->right, batch.subspan(plan->left_batch), cfg);
          },
          batch.size() > cfg.seq_cutoff);
      plan->removed = plan->left->removed + plan->right->removed;
      return plan;
    }
  }
  return plan;
}

template <class Coord, int D>
Node<Coord, D>* erase_from_leaf(LeafNode<Coord, D>* leaf,
                                std::span<Point<Coord, D>> batch) {
  std::vector<Point<Coord, D>> b(batch.begin(), batch.end());
  std::sort(b.begin(), b.end());
  std::vector<Point<Coord, D>> a(leaf->pts);
  std::sort(a.begin(), a.end());
  std::vector<Point<Coord, D>> remain;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(remain));
  if (remain.empty()) {
    delete leaf;
    return nullptr;
  }
  leaf->pts = std::move(remain);
  leaf->size = leaf->pts.size();
  return leaf;
}

template <class Coord, int D>
Node<Coord, D>* apply_delete(Node<Coord, D>* t, const DeletePlan& plan,
                             std::span<Point<Coord, D>> batch, StreamId stream,
                             const Config& cfg, UpdateStats& stats, bool rebalance) {
  if (!t || plan.removed == 0) return t;
  switch (t->kind) {
    case NodeKind::Leaf:
      return erase_from_leaf(as_leaf(t), batch);
    case NodeKind::Heavy: {
      if (plan.removed >= t->size) {
        destroy_tree(t);
        return nullptr;
      }
      t->size -= plan.removed;
      return t;
    }
    case NodeKind::Interior: {
      auto* in = as_interior(t);
      const std::size_t new_total = t->size - plan.removed;
      if (new_total == 0) {
        destroy_tree(t);
        return nullptr;
      }
      const std::size_t new_left = subtree_size(in->left) - plan.left->removed;
      BalancePredicate balanced{cfg.alpha, cfg.phi};
      if (rebalance && !balanced(new_left, new_total)) {
        // Topmost violating node: apply the removals below, then rebuild
        // from the surviving points.
        Node<Coord, D>* applied =
            apply_delete(t, plan, batch, stream, cfg, stats, false);
        return rebuild_with(applied, std::span<const Point<Coord, D>>{}, stream,
                            cfg, stats);
      }
      Node<Coord, D>*l, *r;
      par_do(
          [&] {
            l = apply_delete(in->left, *plan.left, batch.first(plan.left_batch),
                             stream.child(2), cfg, stats, rebalance);
          },
          [&] {
            r = apply_delete(in->right, *plan.right, batch.subspan(plan.left_batch),
                             stream.child(3), cfg, stats, rebalance);
          },
          batch.size() > cfg.seq_cutoff);
      if (!l || !r) {
        Node<Coord, D>* survivor = l ? l : r;
        delete in;
        return survivor;
      }
      in->left = l;
      in->right = r;
      in->size = new_total;
      return in;
    }
  }
  return t;
}

}  // namespace detail

// Removes one stored occurrence per batch element when present; absent
// elements are discarded. Round 1 routes the batch to the leaves and
// computes exact post-delete sizes; round 2 applies the removals and
// rebuilds the topmost subtree on any path whose post-delete sizes
// violate the balance predicate. Takes ownership of `tree`.
template <class Coord, int D>
Node<Coord, D>* batch_delete(Node<Coord, D>* tree, std::vector<Point<Coord, D>> batch,
                             const Config& cfg, UpdateStats& stats,
                             StreamId stream = StreamId{2}) {
  cfg.validate();
  if (!tree || batch.empty()) return tree;
  auto plan = detail::plan_delete(tree, std::span(batch), cfg);
  return detail::apply_delete(tree, *plan, std::span(batch), stream, cfg, stats, true);
}

}  // namespace pkd
