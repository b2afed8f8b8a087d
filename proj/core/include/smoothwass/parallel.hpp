#ifndef SMOOTHWASS_PARALLEL_HPP_
#define SMOOTHWASS_PARALLEL_HPP_

#include <functional>

namespace smoothwass {

// Requested thread count clamped by the SMOOTHWASS_THREADS environment
// variable and hardware concurrency; minimum 1.
int effective_parallelism(int requested);

// Runs body(i) for i in [0, n) on `threads` workers pulling from a shared
// atomic counter.  Bodies must not share mutable state; exceptions are
// rethrown on the caller thread (first by index).
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace smoothwass

#endif  // SMOOTHWASS_PARALLEL_HPP_
