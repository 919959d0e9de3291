#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "helpers.hpp"

using namespace pkd;
using namespace pkd::testing;

using P3 = Point<long long, 3>;

TEST_CASE("gen_uniform determinism, bounds and moments") {
  GenSpec<long long, 3> spec;
  spec.n = 100'000;
  spec.seed = 5;
  auto a = gen_uniform(spec);
  auto b = gen_uniform(spec);
  CHECK(a == b);
  CHECK(a.size() == 100'000);

  double mean[3] = {0, 0, 0};
  for (const auto& p : a)
    for (int d = 0; d < 3; ++d) {
      REQUIRE(p[d] >= spec.lo);
      REQUIRE(p[d] <= spec.hi);
      mean[d] += double(p[d]);
    }
  const double mid = (double(spec.lo) + double(spec.hi)) / 2;
  for (int d = 0; d < 3; ++d)
    CHECK(std::abs(mean[d] / double(spec.n) - mid) < 0.01 * mid);

  spec.n = 0;
  CHECK(gen_uniform(spec).empty());
}

TEST_CASE("gen_varden determinism and bounds") {
  GenSpec<long long, 2> spec;
  spec.dist = Distribution::Varden;
  spec.n = 50'000;
  spec.seed = 6;
  auto a = gen_varden(spec);
  CHECK(a == gen_varden(spec));
  for (const auto& p : a)
    for (int d = 0; d < 2; ++d) {
      REQUIRE(p[d] >= spec.lo);
      REQUIRE(p[d] <= spec.hi);
    }

  spec.n = 1;
  CHECK(gen_varden(spec).size() == 1);
}

TEST_CASE("varden is much denser than uniform") {
  const std::size_t n = 100'000;
  auto uni = uniform_points<long long, 3>(n, 7);
  auto var = varden_points<long long, 3>(n, 7);

  // Median 1-NN distance via the tree (k=2; the nearest hit is the query
  // point itself).
  auto median_nn = [](const std::vector<P3>& pts) {
    KdTree<long long, 3> tree;
    tree.build(pts);
    std::vector<double> d;
    for (std::size_t i = 0; i < pts.size(); i += 97) {
      auto res = tree.knn(pts[i], 2);
      d.push_back(std::sqrt(double(res.back().first)));
    }
    std::nth_element(d.begin(), d.begin() + std::ptrdiff_t(d.size() / 2), d.end());
    return d[d.size() / 2];
  };
  CHECK(median_nn(var) * 5 <= median_nn(uni));
}

TEST_CASE("generate dispatches on the distribution") {
  GenSpec<long long, 2> spec;
  spec.n = 100;
  spec.seed = 8;
  CHECK(generate(spec) == gen_uniform(spec));
  spec.dist = Distribution::Varden;
  CHECK(generate(spec) == gen_varden(spec));
}

TEST_CASE("spec validation") {
  GenSpec<long long, 2> spec;
  spec.lo = 10;
  spec.hi = 10;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.hi = 20;
  spec.restart_prob = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const char* name)
      : path((std::filesystem::temp_directory_path() / name).string()) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("binary point-file round trip is bit exact") {
  auto pts = uniform_points<long long, 3>(1'234, 9);
  TempFile f("pkd_io_bin.pts");
  write_point_file<long long, 3>(f.path, pts);

  auto info = peek_point_file(f.path);
  CHECK(info.n == 1'234);
  CHECK(info.dims == 3);
  CHECK(!info.real);
  CHECK(!info.csv);
  CHECK(read_point_file<long long, 3>(f.path) == pts);
}

TEST_CASE("csv point-file round trip") {
  auto pts = uniform_points<long long, 2>(321, 10);
  TempFile f("pkd_io_csv.pts");
  write_point_file<long long, 2>(f.path, pts, true);
  auto info = peek_point_file(f.path);
  CHECK(info.csv);
  CHECK(read_point_file<long long, 2>(f.path) == pts);
}

TEST_CASE("real coordinates round trip") {
  GenSpec<double, 2> spec;
  spec.n = 200;
  spec.seed = 11;
  auto pts = generate(spec);
  TempFile bin("pkd_io_real.pts");
  write_point_file<double, 2>(bin.path, pts);
  CHECK(read_point_file<double, 2>(bin.path) == pts);

  // max_digits10 formatting keeps csv round trips exact too.
  TempFile csv("pkd_io_real_csv.pts");
  write_point_file<double, 2>(csv.path, pts, true);
  CHECK(read_point_file<double, 2>(csv.path) == pts);
}

TEST_CASE("reader rejects mismatches") {
  auto pts = uniform_points<long long, 2>(10, 12);
  TempFile f("pkd_io_mismatch.pts");
  write_point_file<long long, 2>(f.path, pts);
  CHECK_THROWS(read_point_file<long long, 3>(f.path));
  CHECK_THROWS(read_point_file<double, 2>(f.path));
  CHECK_THROWS(peek_point_file("/nonexistent/pkd.pts"));
}
