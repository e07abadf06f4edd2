#pragma once

#include <cstddef>
#include <functional>

namespace infotrans {

// Thread cap: INFOTRANS_THREADS if set (>=1), else hardware concurrency.
int thread_cap();

// Runs fn(begin, end) over disjoint chunks of [0, n), possibly on worker
// threads. Callers must only write to disjoint outputs; reductions stay
// serial so results are identical for every thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace infotrans
