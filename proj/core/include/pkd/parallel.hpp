#pragma once

// Thin fork-join layer over oneTBB. Everything in the library funnels
// parallelism through these helpers so granularity control and the
// thread-count limit live in one place.

#include <cstddef>
#include <memory>
#include <thread>

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>
#include <tbb/parallel_invoke.h>
#include <tbb/task_group.h>

namespace pkd {

inline unsigned hardware_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

// Caps the scheduler's worker count while alive. Intended for the CLI's
// --threads flag and for the determinism tests.
class ThreadLimit {
 public:
  explicit ThreadLimit(unsigned n)
      : ctl_(std::make_unique<tbb::global_control>(
            tbb::global_control::max_allowed_parallelism, n == 0 ? 1 : n)) {}

 private:
  std::unique_ptr<tbb::global_control> ctl_;
};

// Run f and g as parallel tasks when `par`, sequentially otherwise.
template <class F, class G>
void par_do(F&& f, G&& g, bool par = true) {
  if (par) {
    tbb::parallel_invoke(std::forward<F>(f), std::forward<G>(g));
  } else {
    f();
    g();
  }
}

template <class F>
void par_for(std::size_t begin, std::size_t end, std::size_t grain, F&& f) {
  if (end <= begin) return;
  if (end - begin <= grain) {
    for (std::size_t i = begin; i < end; ++i) f(i);
    return;
  }
  tbb::parallel_for(tbb::blocked_range<std::size_t>(begin, end, grain),
                    [&](const tbb::blocked_range<std::size_t>& r) {
                      for (std::size_t i = r.begin(); i != r.end(); ++i) f(i);
                    });
}

using TaskGroup = tbb::task_group;

}  // namespace pkd
