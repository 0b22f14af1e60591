#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace flexroc {

/// Execution mode for the data-parallel kernels (simplex pivot updates,
/// scenario sweeps, Monte-Carlo batches). Every kernel has a serial
/// reference implementation; results are identical in both modes.
enum class ParallelMode { serial, openmp };

inline bool openmp_compiled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

inline ParallelMode default_parallel_mode() {
  return openmp_compiled() ? ParallelMode::openmp : ParallelMode::serial;
}

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace flexroc
