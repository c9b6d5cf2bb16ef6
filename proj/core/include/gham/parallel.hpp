#pragma once

#include <functional>

namespace gham {

/// Worker-pool width: the HAM_THREADS environment variable when set to a
/// positive integer, otherwise the available hardware parallelism.
int thread_count();

/// Run body(i) for i in [begin, end) across the worker pool. Iterations must
/// be independent; exceptions propagate from the first failing index.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

} // namespace gham
