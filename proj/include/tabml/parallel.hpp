#pragma once

#include <cstddef>
#include <functional>

namespace tabml {

/// Upper bound on worker threads used by `parallel_for`. Defaults to 1.
void set_thread_limit(std::size_t threads);
std::size_t thread_limit();

/// Runs body(i) for i in [0, n). Tasks must write only to their own slot;
/// callers merge results in index order, so output does not depend on the
/// worker count. Nested calls from inside a worker run serially.
/// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tabml
