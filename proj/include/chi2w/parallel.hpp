#pragma once

#include <functional>

namespace chi2w {

/// CHI2W_THREADS when set to a positive integer, else hardware concurrency.
unsigned worker_count();

/// Runs body(i) for every i in [0, count) on up to worker_count() threads.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(int count, const std::function<void(int)>& body);

}  // namespace chi2w
