#ifndef HIB_PARALLEL_HPP
#define HIB_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace hib {

/// Calls fn(i) for every i in [0, n) using up to `workers` threads, each
/// taking a contiguous block of indices. fn must write only to slots owned
/// by i; results then do not depend on the worker count. If any call throws,
/// the exception from the smallest failing index is rethrown.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace hib

#endif  // HIB_PARALLEL_HPP
