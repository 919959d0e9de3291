#include <doctest.h>

#include "helpers.hpp"

using namespace pkd;
using namespace pkd::testing;

using P2 = Point<long long, 2>;
using P3 = Point<long long, 3>;

TEST_CASE("knn basics") {
  KdTree<long long, 2> tree;
  tree.build({P2{{0, 0}}, P2{{1, 1}}, P2{{2, 2}}});
  auto res = tree.knn(P2{{0, 0}}, 1);
  REQUIRE(res.size() == 1);
  CHECK(res[0].first == 0);
  CHECK(res[0].second == P2{{0, 0}});

  // k >= n returns everything, ascending.
  auto all = tree.knn(P2{{0, 0}}, 10);
  REQUIRE(all.size() == 3);
  CHECK(all[0].first == 0);
  CHECK(all[1].first == 2);
  CHECK(all[2].first == 8);

  CHECK_THROWS_AS(tree.knn(P2{{0, 0}}, 0), std::invalid_argument);

  KdTree<long long, 2> empty;
  CHECK(empty.knn(P2{{0, 0}}, 3).empty());
}

TEST_CASE("knn oracle equivalence") {
  auto pts = uniform_points<long long, 3>(2'000, 21);
  KdTree<long long, 3> tree;
  tree.build(pts);
  auto queries = uniform_points<long long, 3>(100, 22);
  for (const auto& q : queries)
    for (std::size_t k : {std::size_t(1), std::size_t(10), std::size_t(100)}) {
      auto got = tree.knn(q, k);
      auto want = oracle::brute_knn(std::span<const P3>(pts), q, k);
      REQUIRE(multiset_eq(distances(got), distances(want)));
    }
}

TEST_CASE("knn monotonicity in k") {
  auto pts = varden_points<long long, 3>(3'000, 23);
  KdTree<long long, 3> tree;
  tree.build(pts);
  auto queries = uniform_points<long long, 3>(30, 24);
  for (const auto& q : queries) {
    auto big = tree.knn(q, 50);
    auto big_d = distances(big);
    for (std::size_t k : {std::size_t(1), std::size_t(7), std::size_t(25)}) {
      auto small = tree.knn(q, k);
      REQUIRE(multiset_eq(distances(small),
                          decltype(big_d)(big_d.begin(), big_d.begin() + std::ptrdiff_t(k))));
    }
    for (std::size_t i = 1; i < big.size(); ++i) REQUIRE(big[i - 1].first <= big[i].first);
  }
}

TEST_CASE("pruning soundness") {
  auto pts = uniform_points<long long, 2>(4'000, 25);
  Config cfg;
  Box<long long, 2> box;
  auto copy = pts;
  auto* t = build(copy, cfg, &box);
  std::mt19937_64 rng(26);
  std::uniform_int_distribution<long long> coord(-100'000'000, 1'100'000'000);
  for (int i = 0; i < 50; ++i) {
    P2 q{{coord(rng), coord(rng)}};
    auto pruned = knn(t, box, q, 10, true);
    auto exhaustive = knn(t, box, q, 10, false);
    REQUIRE(multiset_eq(distances(pruned), distances(exhaustive)));

    P2 a{{coord(rng), coord(rng)}}, b{{coord(rng), coord(rng)}};
    Box<long long, 2> query{{{std::min(a[0], b[0]), std::min(a[1], b[1])}},
                            {{std::max(a[0], b[0]), std::max(a[1], b[1])}}};
    REQUIRE(range_count(t, box, query, true) == range_count(t, box, query, false));
    REQUIRE(multiset_eq(range_report(t, box, query, true),
                        range_report(t, box, query, false)));
  }
  destroy_tree(t);
}

TEST_CASE("range queries against the oracle") {
  auto pts = uniform_points<long long, 3>(5'000, 27);
  KdTree<long long, 3> tree;
  tree.build(pts);

  Box<long long, 3> everything{{{0, 0, 0}},
                               {{1'000'000'000, 1'000'000'000, 1'000'000'000}}};
  CHECK(tree.range_count(everything) == pts.size());
  CHECK(multiset_eq(tree.range_report(everything), pts));

  Box<long long, 3> nothing{{{-10, -10, -10}}, {{-1, -1, -1}}};
  CHECK(tree.range_count(nothing) == 0);
  CHECK(tree.range_report(nothing).empty());

  std::mt19937_64 rng(28);
  std::uniform_int_distribution<long long> coord(0, 1'000'000'000);
  for (int i = 0; i < 100; ++i) {
    P3 a{{coord(rng), coord(rng), coord(rng)}}, b{{coord(rng), coord(rng), coord(rng)}};
    Box<long long, 3> q{{{std::min(a[0], b[0]), std::min(a[1], b[1]), std::min(a[2], b[2])}},
                        {{std::max(a[0], b[0]), std::max(a[1], b[1]), std::max(a[2], b[2])}}};
    auto count = tree.range_count(q);
    auto report = tree.range_report(q);
    REQUIRE(count == oracle::brute_range_count(std::span<const P3>(pts), q));
    REQUIRE(report.size() == count);
    REQUIRE(multiset_eq(report, oracle::brute_range_report(std::span<const P3>(pts), q)));
  }
}

TEST_CASE("heavy leaves in queries") {
  std::vector<P2> pts(50, P2{{5, 5}});
  auto extra = uniform_points<long long, 2>(500, 29, 100LL, 1'000'000LL);
  pts.insert(pts.end(), extra.begin(), extra.end());
  KdTree<long long, 2> tree;
  tree.build(pts);
  REQUIRE(tree.check().empty());

  auto res = tree.knn(P2{{5, 5}}, 10);
  REQUIRE(res.size() == 10);
  for (const auto& [d, p] : res) {
    CHECK(d == 0);
    CHECK(p == P2{{5, 5}});
  }

  Box<long long, 2> q{{{0, 0}}, {{10, 10}}};
  CHECK(tree.range_count(q) == 50);
  CHECK(tree.range_report(q).size() == 50);
}

TEST_CASE("queries work on real coordinates") {
  GenSpec<double, 2> spec;
  spec.n = 1'000;
  spec.seed = 30;
  auto pts = generate(spec);
  KdTree<double, 2> tree;
  tree.build(pts);
  REQUIRE(tree.check().empty());
  Point<double, 2> q{{0.5, 0.5}};
  auto got = tree.knn(q, 5);
  auto want = oracle::brute_knn(std::span<const Point<double, 2>>(pts), q, 5);
  REQUIRE(got.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(got[i].first == doctest::Approx(want[i].first));
}
