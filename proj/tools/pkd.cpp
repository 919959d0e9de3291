// pkd: benchmark and utility CLI for the parallel batch-dynamic kd-tree.
//
// Subcommands: gen | bench build | bench update | bench query |
// bench sweep-alpha | verify. Benchmark records are JSON lines; a fixed
// seed reproduces identical trees (not identical times). Exit codes:
// 0 success, 1 usage error, 2 validation failure.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pkd/pkd.hpp"

using json = nlohmann::json;

namespace {

constexpr int kExitValidation = 2;

struct CommonOpts {
  std::string dist = "uniform";
  std::size_t n = 1'000'000;
  int dims = 3;
  std::uint64_t seed = 42;
  std::string in_path;   // point file; overrides the generator
  std::string out_path;  // record sink; empty = stdout
  int threads = 0;       // 0 = hardware default (or PKD_THREADS)
  int reps = 3;
  pkd::Config cfg;
};

void add_common_flags(CLI::App* app, CommonOpts& o) {
  app->add_option("--dist", o.dist, "uniform|varden")
      ->check(CLI::IsMember({"uniform", "varden"}));
  app->add_option("--n", o.n, "number of points");
  app->add_option("--dims", o.dims, "dimension (2..8)")->check(CLI::Range(2, 8));
  app->add_option("--seed", o.seed, "RNG seed");
  app->add_option("--in", o.in_path, "read points from a pkd-points file");
  app->add_option("--output", o.out_path, "write JSON-lines records to a file");
  app->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  app->add_option("--reps", o.reps, "timed repetitions after one warm-up");
  app->add_option("--lambda", o.cfg.lambda, "skeleton height");
  app->add_option("--sigma", o.cfg.sigma, "oversampling rate");
  app->add_option("--alpha", o.cfg.alpha, "balance slack");
  app->add_option("--leaf", o.cfg.phi, "leaf wrap");
  app->add_option("--seq-cutoff", o.cfg.seq_cutoff, "sequential cutoff");
}

int effective_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("PKD_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return int(pkd::hardware_threads());
}

class RecordSink {
 public:
  explicit RecordSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path);
    }
  }
  void emit(const json& j) {
    (file_.is_open() ? file_ : std::cout) << j.dump() << "\n";
  }

 private:
  std::ofstream file_;
};

json base_record(const CommonOpts& o, int threads) {
  return json{{"n", o.n},          {"dims", o.dims},
              {"dist", o.dist},    {"seed", o.seed},
              {"threads", threads}, {"alpha", o.cfg.alpha},
              {"lambda", o.cfg.lambda}, {"sigma", o.cfg.sigma},
              {"phi", o.cfg.phi}};
}

double ns_since(std::chrono::steady_clock::time_point t0) {
  return double(std::chrono::duration_cast<std::chrono::nanoseconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count());
}

template <class F>
double timed_ns(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return ns_since(t0);
}

template <int D>
pkd::GenSpec<long long, D> make_spec(const CommonOpts& o, std::uint64_t seed_offset = 0) {
  pkd::GenSpec<long long, D> spec;
  spec.dist = o.dist == "uniform" ? pkd::Distribution::Uniform : pkd::Distribution::Varden;
  spec.n = o.n;
  spec.seed = o.seed + seed_offset;
  return spec;
}

template <int D>
std::vector<pkd::Point<long long, D>> load_points(const CommonOpts& o) {
  if (!o.in_path.empty()) return pkd::read_point_file<long long, D>(o.in_path);
  return pkd::generate(make_spec<D>(o));
}

template <class Tree>
void gate_check(const Tree& tree) {
  auto violations = tree.check();
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "validation: " << v << "\n";
    std::exit(kExitValidation);
  }
}

// ---------------------------------------------------------------- build

template <int D>
int run_build(const CommonOpts& o) {
  auto pts = load_points<D>(o);
  const int threads = effective_threads(o.threads);
  pkd::ThreadLimit limit{unsigned(threads)};
  RecordSink sink(o.out_path);

  std::vector<double> times;
  pkd::KdTree<long long, D> tree(o.cfg);
  for (int rep = -1; rep < o.reps; ++rep) {  // rep -1 is the warm-up
    auto copy = pts;
    double ns = timed_ns([&] { tree.build(std::move(copy)); });
    if (rep < 0) {
      gate_check(tree);
      continue;
    }
    times.push_back(ns);
    json rec = base_record(o, threads);
    rec["op"] = "build";
    rec["rep"] = rep;
    rec["wall_ns"] = ns;
    rec["throughput_pts_per_s"] = double(pts.size()) / (ns * 1e-9);
    rec["height"] = tree.height();
    sink.emit(rec);
  }
  json summary = base_record(o, threads);
  summary["op"] = "build.mean";
  summary["wall_ns"] = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
  sink.emit(summary);
  return 0;
}

// ---------------------------------------------------------------- update

template <int D>
int run_update(const CommonOpts& o, const std::string& op,
               const std::vector<double>& fracs) {
  auto pts = load_points<D>(o);
  const int threads = effective_threads(o.threads);
  pkd::ThreadLimit limit{unsigned(threads)};
  RecordSink sink(o.out_path);

  pkd::KdTree<long long, D> base(o.cfg);
  base.build(pts);
  gate_check(base);

  for (double frac : fracs) {
    const std::size_t m = std::max<std::size_t>(1, std::size_t(double(pts.size()) * frac));
    std::vector<pkd::Point<long long, D>> batch;
    if (op == "insert") {
      auto spec = make_spec<D>(o, /*seed_offset=*/0x9e37);
      spec.n = m;
      batch = pkd::generate(spec);
    } else {
      // Delete a random sample of stored points.
      batch.reserve(m);
      std::mt19937_64 rng(o.seed ^ 0xd317);
      std::sample(pts.begin(), pts.end(), std::back_inserter(batch), m, rng);
    }

    std::vector<double> times;
    for (int rep = -1; rep < o.reps; ++rep) {
      auto tree = base.copy();
      auto b = batch;
      double ns = timed_ns([&] {
        if (op == "insert")
          tree.insert(std::move(b));
        else
          tree.erase(std::move(b));
      });
      if (rep < 0) {
        gate_check(tree);
        continue;
      }
      times.push_back(ns);
      json rec = base_record(o, threads);
      rec["op"] = "update." + op;
      rec["rep"] = rep;
      rec["batch_size"] = m;
      rec["batch_frac"] = frac;
      rec["wall_ns"] = ns;
      rec["throughput_pts_per_s"] = double(m) / (ns * 1e-9);
      rec["rebuild_count"] = tree.stats().rebuild_count.load();
      rec["rebuild_points"] = tree.stats().rebuild_points.load();
      sink.emit(rec);
    }
    json summary = base_record(o, threads);
    summary["op"] = "update." + op + ".mean";
    summary["batch_size"] = m;
    summary["batch_frac"] = frac;
    summary["wall_ns"] =
        std::accumulate(times.begin(), times.end(), 0.0) / times.size();
    sink.emit(summary);
  }
  return 0;
}

// ---------------------------------------------------------------- query

template <int D>
int run_query(const CommonOpts& o, const std::vector<std::size_t>& ks,
              std::size_t n_queries, std::size_t n_ranges, double range_frac) {
  auto pts = load_points<D>(o);
  const int threads = effective_threads(o.threads);
  pkd::ThreadLimit limit{unsigned(threads)};
  RecordSink sink(o.out_path);

  pkd::KdTree<long long, D> tree(o.cfg);
  tree.build(pts);
  gate_check(tree);

  auto qspec = make_spec<D>(o, /*seed_offset=*/0x517e);
  qspec.n = n_queries;
  auto queries = pkd::generate(qspec);

  // All queries run in parallel; each query runs sequentially.
  for (std::size_t k : ks) {
    std::vector<double> times;
    for (int rep = -1; rep < o.reps; ++rep) {
      double ns = timed_ns([&] {
        pkd::par_for(0, queries.size(), 1, [&](std::size_t i) {
          auto res = tree.knn(queries[i], k);
          if (res.size() != std::min(k, tree.size())) std::abort();
        });
      });
      if (rep < 0) continue;
      times.push_back(ns);
      json rec = base_record(o, threads);
      rec["op"] = "query.knn";
      rec["rep"] = rep;
      rec["k"] = k;
      rec["queries"] = queries.size();
      rec["wall_ns"] = ns;
      rec["throughput_queries_per_s"] = double(queries.size()) / (ns * 1e-9);
      sink.emit(rec);
    }
    json summary = base_record(o, threads);
    summary["op"] = "query.knn.mean";
    summary["k"] = k;
    summary["wall_ns"] =
        std::accumulate(times.begin(), times.end(), 0.0) / times.size();
    sink.emit(summary);
  }

  if (n_ranges > 0) {
    // Random boxes centered at stored points, extent a fraction of the
    // root bounds.
    const auto& bounds = tree.bounds();
    std::mt19937_64 rng(o.seed ^ 0x0b0f);
    std::vector<pkd::Box<long long, D>> boxes;
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    for (std::size_t i = 0; i < n_ranges; ++i) {
      auto center = pts[pick(rng)];
      pkd::Point<long long, D> lo, hi;
      for (int d = 0; d < D; ++d) {
        long long half = std::max<long long>(
            1, (long long)((double(bounds.hi[d]) - double(bounds.lo[d])) * range_frac / 2));
        lo[d] = center[d] - half;
        hi[d] = center[d] + half;
      }
      boxes.emplace_back(lo, hi);
    }
    std::vector<double> times;
    for (int rep = -1; rep < o.reps; ++rep) {
      double ns = timed_ns([&] {
        pkd::par_for(0, boxes.size(), 1, [&](std::size_t i) {
          auto count = tree.range_count(boxes[i]);
          auto rep_pts = tree.range_report(boxes[i]);
          if (rep_pts.size() != count) std::abort();
        });
      });
      if (rep < 0) continue;
      times.push_back(ns);
      json rec = base_record(o, threads);
      rec["op"] = "query.range";
      rec["rep"] = rep;
      rec["ranges"] = boxes.size();
      rec["range_frac"] = range_frac;
      rec["wall_ns"] = ns;
      rec["throughput_queries_per_s"] = double(boxes.size()) / (ns * 1e-9);
      sink.emit(rec);
    }
    json summary = base_record(o, threads);
    summary["op"] = "query.range.mean";
    summary["wall_ns"] =
        std::accumulate(times.begin(), times.end(), 0.0) / times.size();
    sink.emit(summary);
  }
  return 0;
}

// ----------------------------------------------------------- sweep-alpha

template <int D>
int run_sweep_alpha(const CommonOpts& o, const std::vector<double>& alphas,
                    std::size_t n_batches) {
  const int threads = effective_threads(o.threads);
  pkd::ThreadLimit limit{unsigned(threads)};
  RecordSink sink(o.out_path);

  auto spec = make_spec<D>(o);
  auto pts = pkd::generate(spec);
  const std::size_t batch_size = std::max<std::size_t>(1, pts.size() / n_batches);

  for (double alpha : alphas) {
    pkd::Config cfg = o.cfg;
    cfg.alpha = alpha;
    pkd::KdTree<long long, D> tree(cfg);
    double ns = timed_ns([&] {
      for (std::size_t b = 0; b * batch_size < pts.size(); ++b) {
        std::size_t lo = b * batch_size;
        std::size_t hi = std::min(pts.size(), lo + batch_size);
        tree.insert({pts.begin() + lo, pts.begin() + hi});
      }
    });
    gate_check(tree);
    json rec = base_record(o, threads);
    rec["op"] = "sweep-alpha";
    rec["alpha"] = alpha;
    rec["batches"] = n_batches;
    rec["batch_size"] = batch_size;
    rec["wall_ns"] = ns;
    rec["rebuild_count"] = tree.stats().rebuild_count.load();
    rec["rebuild_points"] = tree.stats().rebuild_points.load();
    rec["rebuild_nodes"] = tree.stats().rebuild_nodes.load();
    rec["height"] = tree.height();
    sink.emit(rec);
  }
  return 0;
}

// ---------------------------------------------------------------- verify

template <class Coord, int D>
int run_verify_typed(const std::string& path, const pkd::Config& cfg, int threads) {
  pkd::ThreadLimit limit{unsigned(threads)};
  auto pts = pkd::read_point_file<Coord, D>(path);
  pkd::KdTree<Coord, D> tree(cfg);
  tree.build(pts);

  auto violations = tree.check();
  for (const auto& v : violations) std::cerr << "check_tree: " << v << "\n";

  std::span<const pkd::Point<Coord, D>> all(pts);
  std::mt19937_64 rng(7);
  std::size_t bad_queries = 0;
  if (!pts.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    const std::size_t n_checks = std::min<std::size_t>(50, pts.size());
    for (std::size_t i = 0; i < n_checks; ++i) {
      const auto& q = pts[pick(rng)];
      auto got = tree.knn(q, 10);
      auto want = pkd::oracle::brute_knn(all, q, 10);
      for (std::size_t j = 0; j < got.size(); ++j)
        if (got[j].first != want[j].first) bad_queries++;
      pkd::Box<Coord, D> box(q, q);
      if (tree.range_count(box) != pkd::oracle::brute_range_count(all, box))
        bad_queries++;
    }
  }
  if (bad_queries) std::cerr << "oracle mismatch in " << bad_queries << " checks\n";
  if (!violations.empty() || bad_queries) return kExitValidation;
  std::cout << "ok: " << pts.size() << " points, height " << tree.height() << "\n";
  return 0;
}

template <int D>
int run_verify(const std::string& path, const pkd::Config& cfg, int threads, bool real) {
  return real ? run_verify_typed<double, D>(path, cfg, threads)
              : run_verify_typed<long long, D>(path, cfg, threads);
}

// ------------------------------------------------------------------ gen

template <class Coord, int D>
int run_gen_typed(const CommonOpts& o, const std::string& out, bool csv,
                  double restart_prob, double step_frac) {
  pkd::GenSpec<Coord, D> spec;
  spec.dist = o.dist == "uniform" ? pkd::Distribution::Uniform : pkd::Distribution::Varden;
  spec.n = o.n;
  spec.seed = o.seed;
  spec.restart_prob = restart_prob;
  spec.step_frac = step_frac;
  auto pts = pkd::generate(spec);
  pkd::write_point_file<Coord, D>(out, pts, csv);
  return 0;
}

template <int D>
int run_gen(const CommonOpts& o, const std::string& out, bool csv, bool real,
            double restart_prob, double step_frac) {
  return real ? run_gen_typed<double, D>(o, out, csv, restart_prob, step_frac)
              : run_gen_typed<long long, D>(o, out, csv, restart_prob, step_frac);
}

template <class F>
int dispatch_dims(int dims, F&& f) {
  switch (dims) {
    case 2: return f(std::integral_constant<int, 2>{});
    case 3: return f(std::integral_constant<int, 3>{});
    case 4: return f(std::integral_constant<int, 4>{});
    case 5: return f(std::integral_constant<int, 5>{});
    case 6: return f(std::integral_constant<int, 6>{});
    case 7: return f(std::integral_constant<int, 7>{});
    case 8: return f(std::integral_constant<int, 8>{});
    default:
      std::cerr << "unsupported dimension " << dims << " (supported: 2..8)\n";
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parallel batch-dynamic kd-tree benchmark harness"};
  app.require_subcommand(1);

  CommonOpts opts;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic point file");
  add_common_flags(gen, opts);
  std::string gen_out;
  bool gen_csv = false, gen_real = false;
  double restart_prob = 1e-4, step_frac = 1e-5;
  gen->add_option("--out", gen_out, "output path")->required();
  gen->add_flag("--csv", gen_csv, "write csv instead of binary");
  gen->add_flag("--real", gen_real, "real-valued coordinates");
  gen->add_option("--restart-prob", restart_prob, "varden restart probability");
  gen->add_option("--step-frac", step_frac, "varden step as a fraction of width");

  // bench + nested subcommands
  auto* bench = app.add_subcommand("bench", "timed experiment suites");
  bench->require_subcommand(1);

  auto* b_build = bench->add_subcommand("build", "tree construction");
  add_common_flags(b_build, opts);

  auto* b_update = bench->add_subcommand("update", "batch insert/delete sweep");
  add_common_flags(b_update, opts);
  std::string update_op = "insert";
  std::vector<double> fracs = {0.0001, 0.001, 0.01, 0.1};
  b_update->add_option("--op", update_op, "insert|delete")
      ->check(CLI::IsMember({"insert", "delete"}));
  b_update->add_option("--batch-frac", fracs, "batch sizes as fractions of n");

  auto* b_query = bench->add_subcommand("query", "knn and range query suites");
  add_common_flags(b_query, opts);
  std::vector<std::size_t> ks = {1, 10, 100};
  std::size_t n_queries = 1000, n_ranges = 100;
  double range_frac = 0.01;
  b_query->add_option("--k", ks, "knn k values");
  b_query->add_option("--queries", n_queries, "number of knn queries");
  b_query->add_option("--ranges", n_ranges, "number of range queries (0 = skip)");
  b_query->add_option("--range-frac", range_frac, "box extent as a fraction of bounds");

  auto* b_sweep = bench->add_subcommand("sweep-alpha", "balance-parameter sweep");
  add_common_flags(b_sweep, opts);
  std::vector<double> alphas = {0.01, 0.1, 0.2, 0.3, 0.4, 0.5};
  std::size_t n_batches = 1000;
  b_sweep->add_option("--alphas", alphas, "alpha values");
  b_sweep->add_option("--batches", n_batches, "number of insert batches");

  // verify
  auto* verify = app.add_subcommand("verify", "build from a point file and validate");
  add_common_flags(verify, opts);
  std::string verify_in;
  verify->add_option("--points", verify_in, "point file to validate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen)
      return dispatch_dims(opts.dims, [&](auto d) {
        return run_gen<d()>(opts, gen_out, gen_csv, gen_real, restart_prob, step_frac);
      });
    if (*b_build)
      return dispatch_dims(opts.dims, [&](auto d) { return run_build<d()>(opts); });
    if (*b_update)
      return dispatch_dims(opts.dims,
                           [&](auto d) { return run_update<d()>(opts, update_op, fracs); });
    if (*b_query)
      return dispatch_dims(opts.dims, [&](auto d) {
        return run_query<d()>(opts, ks, n_queries, n_ranges, range_frac);
      });
    if (*b_sweep)
      return dispatch_dims(opts.dims,
                           [&](auto d) { return run_sweep_alpha<d()>(opts, alphas, n_batches); });
    if (*verify) {
      auto info = pkd::peek_point_file(verify_in);
      return dispatch_dims(info.dims, [&](auto d) {
        return run_verify<d()>(verify_in, opts.cfg, effective_threads(opts.threads),
                               info.real);
      });
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
