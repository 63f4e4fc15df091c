#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vortexflow {

inline void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

inline int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Thread count requested through VORTEXFLOW_THREADS, or 0 when unset/invalid.
inline int threads_from_environment() {
  const char* value = std::getenv("VORTEXFLOW_THREADS");
  if (value == nullptr) return 0;
  try {
    const int n = std::stoi(value);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}

/// Calls fn(i) for every i in [0, n). Iterations must write disjoint outputs;
/// results are then independent of the thread count.
template <class Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
}

}  // namespace vortexflow
