#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pkd/build.hpp"
#include "pkd/config.hpp"
#include "pkd/node.hpp"
#include "pkd/oracle.hpp"
#include "pkd/query.hpp"
#include "pkd/update.hpp"

namespace pkd {

// Owning facade over the node-level algorithms. Queries are read-only
// and may run concurrently with each other; updates require exclusive
// access (single writer, no concurrent readers).
template <class Coord, int D>
class KdTree {
 public:
  using Pt = Point<Coord, D>;
  using KnnEntry = typename KnnBuffer<Coord, D>::Entry;

  explicit KdTree(Config cfg = {}) : cfg_(cfg) { cfg_.validate(); }
  ~KdTree() { destroy_tree(root_); }

  KdTree(KdTree&& o) noexcept
      : root_(std::exchange(o.root_, nullptr)), box_(o.box_), cfg_(o.cfg_),
        epoch_(o.epoch_) {}
  KdTree& operator=(KdTree&& o) noexcept {
    if (this != &o) {
      destroy_tree(root_);
      root_ = std::exchange(o.root_, nullptr);
      box_ = o.box_;
      cfg_ = o.cfg_;
      epoch_ = o.epoch_;
    }
    return *this;
  }
  KdTree(const KdTree&) = delete;
  KdTree& operator=(const KdTree&) = delete;

  KdTree copy() const {
    KdTree t(cfg_);
    t.root_ = clone_tree(root_);
    t.box_ = box_;
    t.epoch_ = epoch_;
    return t;
  }

  void build(std::vector<Pt> pts) {
    destroy_tree(root_);
    root_ = pkd::build(pts, cfg_, &box_);
    epoch_ = 0;
  }

  void insert(std::vector<Pt> batch) {
    for (const auto& p : batch) box_.extend(p);
    root_ = batch_insert(root_, std::move(batch), cfg_, stats_, next_stream());
  }

  void erase(std::vector<Pt> batch) {
    root_ = batch_delete(root_, std::move(batch), cfg_, stats_, next_stream());
  }

  std::vector<KnnEntry> knn(const Pt& q, std::size_t k) const {
    return pkd::knn(root_, box_, q, k);
  }
  std::size_t range_count(const Box<Coord, D>& query) const {
    return pkd::range_count(root_, box_, query);
  }
  std::vector<Pt> range_report(const Box<Coord, D>& query) const {
    return pkd::range_report(root_, box_, query);
  }

  std::vector<Pt> flatten() const { return pkd::flatten(root_); }
  std::vector<std::string> check(oracle::CheckOptions opt = {}) const {
    return oracle::check_tree(root_, cfg_, opt);
  }

  std::size_t size() const { return subtree_size(root_); }
  bool empty() const { return root_ == nullptr; }
  std::size_t height() const { return tree_height(root_); }
  std::uint64_t hash() const { return structure_hash(root_); }
  const Node<Coord, D>* root() const { return root_; }
  const Box<Coord, D>& bounds() const { return box_; }
  const Config& config() const { return cfg_; }
  UpdateStats& stats() { return stats_; }
  const UpdateStats& stats() const { return stats_; }

 private:
  // One fresh, deterministic stream per batch operation; rebuilds derive
  // substreams from it by tree position.
  StreamId next_stream() { return StreamId{0x100 + ++epoch_}; }

  Node<Coord, D>* root_ = nullptr;
  Box<Coord, D> box_;
  Config cfg_;
  UpdateStats stats_;
  std::uint64_t epoch_ = 0;
};

}  // namespace pkd
