#pragma once

#include <functional>

namespace hrqhd {

/// Worker cap: HRQHD_THREADS if set and positive, otherwise 1.
int worker_count();
void set_worker_count(int n);

/// Runs f(i) for i in [0, n). Each index is handled by exactly one worker,
/// so results written per index are deterministic.
void parallel_for(int n, const std::function<void(int)> &f);

} // namespace hrqhd
