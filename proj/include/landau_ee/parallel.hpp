#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace landau_ee {

// Thread count from LANDAU_EE_THREADS, falling back to 1.
int default_threads();

// Runs body(i) for i in [0, n) on up to `threads` workers with a static
// contiguous partition. Each index is visited exactly once, so callers that
// write only to slot i get results independent of the thread count.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      std::size_t lo = n * w / workers, hi = n * (w + 1) / workers;
      pool.emplace_back([lo, hi, w, &body, &errors] {
        try {
          for (std::size_t i = lo; i < hi; ++i) body(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  // Rethrow the failure of the lowest block so the reported error is deterministic.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Pairwise summation; the result depends only on the order of `v`.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace landau_ee
