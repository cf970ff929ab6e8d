#pragma once

#include <cstddef>

namespace msob::par {

/// Number of worker threads used by the parallel kernels. Honors the
/// METRIC_SOBOLEV_THREADS environment variable (values < 1 mean "all cores").
int thread_count();

/// Runs fn(i) for i in [0, n). Iterations must be independent; every kernel
/// built on this writes to disjoint output slots so results are bit-stable
/// regardless of the thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn);

}  // namespace msob::par

#ifdef _OPENMP
#include <omp.h>
#endif

namespace msob::par {

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
#ifdef _OPENMP
    const int threads = thread_count();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        fn(static_cast<std::size_t>(i));
    }
#else
    for (std::size_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace msob::par
