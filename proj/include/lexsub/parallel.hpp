#pragma once

#include <cstddef>
#include <exception>

namespace lexsub {

enum class Execution { kSerial, kParallel };

// Runs fn(i) for i in [0, n). The parallel path uses an OpenMP dynamic
// schedule; the first exception thrown by any iteration is rethrown after
// the loop. fn must only write to per-index state.
template <typename Fn>
void ForEachIndex(std::size_t n, Execution exec, Fn&& fn) {
  if (exec == Execution::kSerial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(lexsub_foreach_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace lexsub
