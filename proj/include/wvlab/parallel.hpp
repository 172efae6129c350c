#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include "wvlab/types.hpp"

namespace wvlab::detail {

// Evaluates fn(i) for i in [0, n) into out[i]. The parallel path writes each
// slot from exactly one iteration, so the result does not depend on the thread
// count. If any iteration throws, the exception of the lowest index is rethrown.
template <typename T, typename Fn>
void parallel_fill(std::vector<T>& out, Execution exec, Fn&& fn) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    return;
  }
  std::vector<std::exception_ptr> errors(out.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = fn(k);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void set_worker_count(int workers);
int worker_count();

}  // namespace wvlab::detail
