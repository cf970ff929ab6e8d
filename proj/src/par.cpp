#include "msob/par.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace msob::par {

int thread_count() {
#ifdef _OPENMP
    static const int cached = [] {
        int n = omp_get_max_threads();
        if (const char* env = std::getenv("METRIC_SOBOLEV_THREADS")) {
            try {
                const int cap = std::stoi(env);
                if (cap >= 1 && cap < n) n = cap;
            } catch (...) {
                // unparsable values fall back to the OpenMP default
            }
        }
        return n;
    }();
    return cached;
#else
    return 1;
#endif
}

}  // namespace msob::par
