#pragma once

#include <cstddef>
#include <functional>

namespace conekernel {

/// Worker count for a request: requested > 0 is taken as is, 0 means the
/// hardware concurrency. CONEKERNEL_THREADS, when set, caps the result.
int resolve_thread_count(int requested) noexcept;

/// Runs fn(task, worker) for task in [0, n_tasks) on up to `threads` workers.
/// Tasks are claimed dynamically, so callers must make results independent of
/// which worker ran which task. If tasks throw, the exception from the
/// lowest-numbered failing task is rethrown after all workers stop.
void parallel_for(std::size_t n_tasks, int threads, const std::function<void(std::size_t task, int worker)>& fn);

} // namespace conekernel
