#include <doctest.h>

#include "helpers.hpp"

using namespace pkd;

using P2 = Point<long long, 2>;
using P3 = Point<long long, 3>;
using B2 = Box<long long, 2>;
using B3 = Box<long long, 3>;

TEST_CASE("widest_dimension") {
  CHECK(widest_dimension(B2{{{0, 0}}, {{10, 3}}}) == 0);
  CHECK(widest_dimension(B3{{{0, 0, 0}}, {{5, 5, 5}}}) == 0);  // tie -> smallest index
  CHECK(widest_dimension(B2{{{-4, 2}}, {{-1, 9}}}) == 1);
  CHECK_THROWS_AS(widest_dimension(B2::make_empty()), std::invalid_argument);
}

TEST_CASE("widest_dimension is translation invariant") {
  B2 box{{{3, -7}}, {{40, 12}}};
  for (long long t : {-100LL, 0LL, 999LL}) {
    B2 shifted{{{box.lo[0] + t, box.lo[1] + t}}, {{box.hi[0] + t, box.hi[1] + t}}};
    CHECK(widest_dimension(shifted) == widest_dimension(box));
  }
}

TEST_CASE("split_box") {
  B2 box{{{0, 0}}, {{10, 10}}};
  auto [l, r] = split_box(box, Splitter<long long>{0, 4});
  CHECK(l == B2{{{0, 0}}, {{4, 10}}});
  CHECK(r == B2{{{4, 0}}, {{10, 10}}});

  auto [l2, r2] = split_box(box, Splitter<long long>{1, 10});
  CHECK(l2 == box);
  CHECK(r2.empty == false);  // right keeps the boundary slab [10,10]
  CHECK(r2.lo[1] == 10);

  B2 neg{{{-5, -5}}, {{5, 5}}};
  auto [l3, r3] = split_box(neg, Splitter<long long>{1, 0});
  CHECK(l3 == B2{{{-5, -5}}, {{5, 0}}});
  CHECK(r3 == B2{{{-5, 0}}, {{5, 5}}});

  // Splitter coordinate below the box empties the left side.
  auto [l4, r4] = split_box(box, Splitter<long long>{0, -1});
  CHECK(l4.empty);
  CHECK(r4 == box);
}

TEST_CASE("box_relation") {
  B2 query{{{0, 0}}, {{5, 5}}};
  CHECK(box_relation(B2{{{1, 1}}, {{2, 2}}}, query) == BoxRel::Contained);
  CHECK(box_relation(B2{{{6, 6}}, {{9, 9}}}, query) == BoxRel::Disjoint);
  CHECK(box_relation(B2{{{4, 4}}, {{7, 7}}}, query) == BoxRel::Intersects);
  CHECK(box_relation(B2::make_empty(), query) == BoxRel::Disjoint);
}

TEST_CASE("squared_distance") {
  CHECK(squared_distance(P2{{0, 0}}, P2{{3, 4}}) == 25);
  CHECK(squared_distance(P2{{7, -2}}, P2{{7, -2}}) == 0);
  CHECK(squared_distance(P3{{1, 2, 3}}, P3{{4, 6, 3}}) == 25);
}

TEST_CASE("squared_distance does not overflow 64-bit coordinates") {
  const long long big = 1'000'000'000'000'000'000LL;
  P2 a{{-big, -big}}, b{{big, big}};
  __int128 side = __int128(2) * big;
  CHECK(squared_distance(a, b) == 2 * side * side);
}

TEST_CASE("box contains is closed on both ends") {
  B2 box{{{0, 0}}, {{5, 5}}};
  CHECK(box.contains(P2{{0, 5}}));
  CHECK(box.contains(P2{{5, 0}}));
  CHECK(!box.contains(P2{{6, 0}}));
  CHECK(!B2::make_empty().contains(P2{{0, 0}}));
}

TEST_CASE("box_squared_distance") {
  B2 box{{{0, 0}}, {{10, 10}}};
  CHECK(box_squared_distance(box, P2{{5, 5}}) == 0);
  CHECK(box_squared_distance(box, P2{{13, 14}}) == 25);
  CHECK(box_squared_distance(B2::make_empty(), P2{{0, 0}}) ==
        dist_max<dist_t<long long>>());
}

TEST_CASE("is_balanced") {
  CHECK(is_balanced(50, 100, 0.3));
  CHECK(!is_balanced(81, 100, 0.3));
  CHECK(is_balanced(80, 100, 0.3));  // boundary inclusive
  CHECK(is_balanced(20, 100, 0.3));
  CHECK(!is_balanced(19, 100, 0.3));
  CHECK(is_balanced(0, 0, 0.3));
}

TEST_CASE("balance predicate never rebuilds at or below the leaf wrap") {
  BalancePredicate pred{0.0, 32};
  CHECK(pred(0, 32));
  CHECK(!pred(0, 33));
}
