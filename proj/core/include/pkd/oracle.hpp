#pragma once

// Brute-force reference implementations and structural validators.
// Intentionally sequential and simple; they share only the core types
// with the query module so equivalence tests are meaningful.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "pkd/config.hpp"
#include "pkd/geometry.hpp"
#include "pkd/node.hpp"
#include "pkd/update.hpp"

namespace pkd::oracle {

template <class Coord, int D>
std::vector<std::pair<dist_t<Coord>, Point<Coord, D>>> brute_knn(
    std::span<const Point<Coord, D>> pts, const Point<Coord, D>& q, std::size_t k) {
  std::vector<std::pair<dist_t<Coord>, Point<Coord, D>>> all;
  all.reserve(pts.size());
  for (const auto& p : pts) all.emplace_back(squared_distance(p, q), p);
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  all.resize(std::min(k, all.size()));
  return all;
}

template <class Coord, int D>
std::size_t brute_range_count(std::span<const Point<Coord, D>> pts,
                              const Box<Coord, D>& box) {
  std::size_t c = 0;
  for (const auto& p : pts) c += box.contains(p);
  return c;
}

template <class Coord, int D>
std::vector<Point<Coord, D>> brute_range_report(std::span<const Point<Coord, D>> pts,
                                                const Box<Coord, D>& box) {
  std::vector<Point<Coord, D>> out;
  for (const auto& p : pts)
    if (box.contains(p)) out.push_back(p);
  return out;
}

struct CheckOptions {
  std::size_t balance_min_size = 256;  // audit only nodes at least this big
  double balance_slack = 0.05;         // extra slack over cfg.alpha
  std::size_t max_violations = 64;
};

namespace detail {

template <class Coord, int D>
struct Checker {
  const Config& cfg;
  const CheckOptions& opt;
  std::vector<std::string>& out;

  void report(const std::string& msg) {
    if (out.size() < opt.max_violations) out.push_back(msg);
  }

  // Bounds accumulated from ancestor splitters: every point must satisfy
  // lower[d] <= x[d] (inclusive, right subtrees) and x[d] < upper[d]
  // (strict, left subtrees).
  void check_point(const Point<Coord, D>& p,
                   const std::array<std::optional<Coord>, D>& lower,
                   const std::array<std::optional<Coord>, D>& upper) {
    for (int i = 0; i < D; ++i) {
      if (lower[i] && p[i] < *lower[i]) report("kd violation: point below splitter bound");
      if (upper[i] && !(p[i] < *upper[i])) report("kd violation: point not left of splitter");
    }
  }

  std::size_t walk(const Node<Coord, D>* n, std::array<std::optional<Coord>, D> lower,
                   std::array<std::optional<Coord>, D> upper) {
    if (!n) return 0;
    switch (n->kind) {
      case NodeKind::Leaf: {
        const auto* leaf = as_leaf(n);
        if (leaf->pts.size() != n->size) report("leaf size field mismatch");
        if (leaf->pts.size() > cfg.phi) report("leaf exceeds wrap threshold");
        for (const auto& p : leaf->pts) check_point(p, lower, upper);
        return leaf->pts.size();
      }
      case NodeKind::Heavy: {
        if (n->size < 1) report("heavy leaf with zero multiplicity");
        check_point(as_heavy(n)->pt, lower, upper);
        return n->size;
      }
      case NodeKind::Interior: {
        const auto* in = as_interior(n);
        if (!in->left || !in->right) {
          report("interior node with missing child");
          return n->size;
        }
        auto lup = upper;
        if (!lup[in->split.dim] || in->split.coord < *lup[in->split.dim])
          lup[in->split.dim] = in->split.coord;
        auto rlo = lower;
        if (!rlo[in->split.dim] || in->split.coord > *rlo[in->split.dim])
          rlo[in->split.dim] = in->split.coord;
        std::size_t ls = walk(in->left, lower, lup);
        std::size_t rs = walk(in->right, rlo, upper);
        if (ls + rs != n->size) {
          std::ostringstream ss;
          ss << "size field mismatch: stored " << n->size << " recomputed " << ls + rs;
          report(ss.str());
        }
        if (n->size >= opt.balance_min_size &&
            !is_balanced(subtree_size(in->left), n->size,
                         std::min(0.5, cfg.alpha + opt.balance_slack))) {
          std::ostringstream ss;
          ss << "balance violation: left " << subtree_size(in->left) << " of " << n->size;
          report(ss.str());
        }
        return ls + rs;
      }
    }
    return 0;
  }
};

}  // namespace detail

// Full structural sweep: kd invariant, size-field consistency, leaf
// wrap, heavy-leaf well-formedness, and the slack-augmented balance
// audit. Returns the list of violations; empty means valid.
template <class Coord, int D>
std::vector<std::string> check_tree(const Node<Coord, D>* tree, const Config& cfg,
                                    const CheckOptions& opt = {}) {
  std::vector<std::string> out;
  detail::Checker<Coord, D> c{cfg, opt, out};
  c.walk(tree, {}, {});
  return out;
}

}  // namespace pkd::oracle
