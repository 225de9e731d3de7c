#pragma once

#include <cstddef>
#include <exception>
#include <limits>

#include <omp.h>

namespace belgrad {

/// 0 selects the OpenMP default.
inline int resolve_workers(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

/// Runs body(k) for k in [0, n). With parallel == false the loop is a plain
/// serial loop. An exception thrown for any k is rethrown after the loop;
/// when several indices fail, the smallest index wins so the error reported
/// does not depend on scheduling.
template <class Body>
void for_each_index(std::size_t n, int workers, bool parallel, Body&& body) {
  std::exception_ptr failure;
  std::ptrdiff_t failure_index = std::numeric_limits<std::ptrdiff_t>::max();
  const auto count = static_cast<std::ptrdiff_t>(n);
  auto guarded = [&](std::ptrdiff_t k) {
    try {
      body(static_cast<std::size_t>(k));
    } catch (...) {
#pragma omp critical(belgrad_for_each_failure)
      if (k < failure_index) {
        failure_index = k;
        failure = std::current_exception();
      }
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(resolve_workers(workers))
    for (std::ptrdiff_t k = 0; k < count; ++k) guarded(k);
  } else {
    for (std::ptrdiff_t k = 0; k < count; ++k) guarded(k);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace belgrad
