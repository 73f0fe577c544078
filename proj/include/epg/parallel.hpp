#pragma once

#include <cstdint>

namespace epg {

// Execution policy for the element/face kernels. Every kernel that accepts a
// policy has a serial path that produces the same result; tests compare the
// two bitwise. Parallel kernels only compute independent per-index work;
// any scatter or reduction happens serially afterwards in a fixed order, so
// results do not depend on the thread count.
enum class Exec { serial, openmp };

template <class F>
void parallel_for(Exec exec, std::int64_t n, F&& body) {
  if (exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) body(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace epg
