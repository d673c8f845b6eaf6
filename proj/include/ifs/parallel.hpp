#pragma once

#include <cstddef>

namespace ifs {

// Every parallel kernel also runs serially; the serial path is the reference
// the tests compare against.
enum class Exec { Serial, Parallel };

template <class F>
void parallel_for(std::ptrdiff_t n, Exec exec, F&& body) {
#if defined(IFS_HAVE_OPENMP)
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    (void)exec;
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

int worker_count();

}  // namespace ifs
