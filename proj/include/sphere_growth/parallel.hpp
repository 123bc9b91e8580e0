#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sphere_growth {

/// Worker budget for the embarrassingly parallel loops. Results never depend
/// on it: every task writes to its own slot and reductions run in index order.
struct Parallelism {
  unsigned workers = 1;
};

/// Runs body(i) for i in [0, count). The first exception (by index) is
/// rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, Parallelism par, Body&& body) {
  const std::size_t nthreads = std::min<std::size_t>(std::max(1u, par.workers), count);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads - 1);
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace sphere_growth
