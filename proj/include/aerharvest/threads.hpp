#pragma once

#include <omp.h>

#include <cstdlib>

namespace aerharvest {

// Thread cap for the OpenMP kernels, from AERHARVEST_THREADS (default 1).
// All parallel kernels reduce per output element in a fixed serial order, so
// results are identical at any cap; this only trades speed.
inline int thread_count() {
  static const int n = [] {
    const char* env = std::getenv("AERHARVEST_THREADS");
    const int v = env ? std::atoi(env) : 1;
    const int count = v > 0 ? v : 1;
    omp_set_num_threads(count);
    return count;
  }();
  return n;
}

inline bool threads_enabled() { return thread_count() > 1; }

}  // namespace aerharvest
