#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include "engelgrad/types.hpp"

namespace engelgrad {

// Evaluates out[i] = fn(i) for i in [0, n). The parallel path distributes the
// index range with OpenMP; each slot is written by exactly one thread, so
// both paths return identical vectors. Exceptions thrown inside the parallel
// region are captured and rethrown on the calling thread (first index wins).
template <class T, class Fn>
std::vector<T> map_indices(std::size_t n, Exec exec, Fn&& fn) {
  std::vector<T> out(n);
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(n);
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace engelgrad
