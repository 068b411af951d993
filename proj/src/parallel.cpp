#include "hib/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace hib {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t threads = std::min<std::size_t>(std::max(workers, 1), n);
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  struct Failure {
    std::size_t index;
    std::exception_ptr error;
  };
  std::vector<Failure> failures(threads, Failure{n, nullptr});
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t block = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t lo = t * block;
    const std::size_t hi = std::min(n, lo + block);
    pool.emplace_back([&, t, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          failures[t] = {i, std::current_exception()};
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const Failure& f : failures) {
    if (f.error) std::rethrow_exception(f.error);
  }
}

}  // namespace hib
