#pragma once

#include <cstddef>
#include <functional>

namespace genfrac {

/// Worker count: hardware concurrency capped by the GENFRAC_THREADS
/// environment variable (a value of 1 disables threading).
int worker_count();

/// Runs fn(i) for i in [0, count). Items are independent; each item's work is
/// evaluated with a fixed internal order, so results do not depend on the
/// number of workers.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace genfrac
