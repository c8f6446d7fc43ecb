#pragma once

#include <cstddef>
#include <functional>

namespace bf {

// Worker count for library-level loops. Defaults to BETHE_FORGE_JOBS if set,
// otherwise the hardware concurrency (capped at 8).
int jobs();
void set_jobs(int n);

// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
// write results into per-index slots so ordering never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bf
