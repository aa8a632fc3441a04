#ifndef DOASEL_PARALLEL_HPP
#define DOASEL_PARALLEL_HPP

#include <functional>

namespace doasel {

/// Worker count to use: explicit request if > 0, else the DOASEL_THREADS
/// environment variable, else hardware concurrency (at least 1).
int resolve_threads(int requested);

/// Run fn(i) for every i in [0, count) on up to `threads` workers.
/// Iterations must be independent and write only their own slots; the
/// observable result is then identical for any worker count. The first
/// exception thrown by an iteration is rethrown after all workers join.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

} // namespace doasel

#endif // DOASEL_PARALLEL_HPP
