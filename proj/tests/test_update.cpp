#include <doctest.h>

#include "helpers.hpp"

using namespace pkd;
using namespace pkd::testing;

using P2 = Point<long long, 2>;
using P3 = Point<long long, 3>;
using Tree3 = KdTree<long long, 3>;

TEST_CASE("empty batch is a structural no-op") {
  Tree3 tree;
  tree.build(uniform_points<long long, 3>(5'000, 1));
  const auto h = tree.hash();
  tree.insert({});
  CHECK(tree.hash() == h);
  tree.erase({});
  CHECK(tree.hash() == h);
}

TEST_CASE("insert into a leaf rebuilds locally") {
  Tree3 tree;
  auto pts = uniform_points<long long, 3>(10, 2);
  tree.build(pts);
  auto extra = uniform_points<long long, 3>(5, 3);
  tree.insert(extra);
  CHECK(tree.size() == 15);
  CHECK(tree.check().empty());
  auto want = pts;
  want.insert(want.end(), extra.begin(), extra.end());
  CHECK(multiset_eq(tree.flatten(), want));
}

TEST_CASE("insert into an empty tree builds it") {
  Tree3 tree;
  auto pts = uniform_points<long long, 3>(3'000, 4);
  tree.insert(pts);
  CHECK(tree.size() == 3'000);
  CHECK(tree.check().empty());
}

TEST_CASE("multiset semantics against a shadow multiset") {
  Tree3 tree;
  std::vector<P3> shadow;
  std::mt19937_64 rng(99);
  for (int step = 0; step < 30; ++step) {
    if (step % 3 != 2) {
      auto batch = uniform_points<long long, 3>(400, 1000 + step, 0LL, 1000LL);
      shadow.insert(shadow.end(), batch.begin(), batch.end());
      tree.insert(std::move(batch));
    } else if (!shadow.empty()) {
      // Half stored points, half misses; each present element removes
      // exactly one stored occurrence.
      std::vector<P3> batch;
      std::uniform_int_distribution<std::size_t> pick(0, shadow.size() - 1);
      std::vector<std::size_t> victims;
      for (int i = 0; i < 200; ++i) victims.push_back(pick(rng));
      std::sort(victims.begin(), victims.end());
      victims.erase(std::unique(victims.begin(), victims.end()), victims.end());
      for (auto it = victims.rbegin(); it != victims.rend(); ++it) {
        batch.push_back(shadow[*it]);
        shadow.erase(shadow.begin() + std::ptrdiff_t(*it));
      }
      for (int i = 0; i < 100; ++i) batch.push_back(P3{{-1 - i, -1, -1}});  // absent
      tree.erase(std::move(batch));
    }
    REQUIRE(tree.check().empty());
    REQUIRE(tree.size() == shadow.size());
  }
  CHECK(multiset_eq(tree.flatten(), shadow));
}

TEST_CASE("heavy leaf decrement") {
  Config cfg;
  UpdateStats stats;
  Node<long long, 2>* t = new HeavyLeafNode<long long, 2>(P2{{9, 9}}, 5);
  t = batch_delete(t, {P2{{9, 9}}, P2{{9, 9}}}, cfg, stats);
  REQUIRE(t->kind == NodeKind::Heavy);
  CHECK(t->size == 3);

  // Excess batch copies are discarded.
  t = batch_delete(t, std::vector<P2>(10, P2{{9, 9}}), cfg, stats);
  CHECK(t == nullptr);
}

TEST_CASE("deleting everything empties the tree") {
  KdTree<long long, 2> tree;
  auto pts = uniform_points<long long, 2>(4'000, 6);
  tree.build(pts);
  tree.erase(pts);
  CHECK(tree.empty());
  CHECK(tree.size() == 0);
}

TEST_CASE("deleting absent points changes nothing") {
  Tree3 tree;
  tree.build(uniform_points<long long, 3>(2'000, 7));
  const auto h = tree.hash();
  tree.erase(uniform_points<long long, 3>(500, 8, -2'000'000LL, -1'000'000LL));
  CHECK(tree.hash() == h);
}

TEST_CASE("skewed insert rebuilds below the root only") {
  Tree3 tree;
  tree.build(uniform_points<long long, 3>(100'000, 10));
  const auto* root_before = tree.root();
  auto root_split = as_interior(root_before)->split;

  // 10^3 points at maximal coordinates: far too few to unbalance the
  // root, so any rebuild happens on the deep right spine.
  std::vector<P3> batch(1'000, P3{{1'000'000'000, 1'000'000'000, 1'000'000'000}});
  tree.insert(batch);
  CHECK(tree.size() == 101'000);
  CHECK(tree.check().empty());
  REQUIRE(tree.root()->kind == NodeKind::Interior);
  CHECK(as_interior(tree.root())->split == root_split);
  CHECK(tree.stats().rebuild_points.load() < 100'000);
}

TEST_CASE("extract_skeleton covers the tree in symmetric order") {
  Tree3 tree;
  auto pts = uniform_points<long long, 3>(30'000, 11);
  tree.build(pts);
  auto sk = extract_skeleton(const_cast<Node<long long, 3>*>(tree.root()), 6);
  std::vector<P3> concat;
  for (int b = 0; b < sk.num_buckets; ++b)
    for (const auto& e : sk.entries)
      if (e.is_bucket && e.bucket_lo == b) {
        auto part = flatten(e.node);
        concat.insert(concat.end(), part.begin(), part.end());
      }
  CHECK(concat == tree.flatten());

  KdTree<long long, 2> leaf_tree;
  leaf_tree.build(uniform_points<long long, 2>(10, 1));
  CHECK_THROWS_AS(
      extract_skeleton(const_cast<Node<long long, 2>*>(leaf_tree.root()), 6),
      std::invalid_argument);
}

TEST_CASE("update determinism across thread counts") {
  auto base = uniform_points<long long, 3>(40'000, 12);
  std::uint64_t hashes[2];
  unsigned counts[2] = {1, 4};
  for (int i = 0; i < 2; ++i) {
    ThreadLimit limit{counts[i]};
    Tree3 tree;
    tree.build(base);
    for (int b = 0; b < 5; ++b) tree.insert(uniform_points<long long, 3>(2'000, 50 + b));
    for (int b = 0; b < 3; ++b) {
      auto victims = std::vector<P3>(base.begin() + b * 1'000, base.begin() + (b + 1) * 1'000);
      tree.erase(std::move(victims));
    }
    hashes[i] = tree.hash();
  }
  CHECK(hashes[0] == hashes[1]);
}

TEST_CASE("rebuild volume stays amortized over a long varden schedule") {
  Tree3 tree;
  auto pts = varden_points<long long, 3>(1'000'000, 33);
  for (std::size_t b = 0; b < 1'000; ++b)
    tree.insert({pts.begin() + std::ptrdiff_t(b * 1'000),
                 pts.begin() + std::ptrdiff_t((b + 1) * 1'000)});
  REQUIRE(tree.check().empty());
  CHECK(tree.size() == 1'000'000);
  const std::size_t final_nodes = count_nodes(tree.root());
  CHECK(tree.stats().rebuild_nodes.load() <= 30 * final_nodes);
}
