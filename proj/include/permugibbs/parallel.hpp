#pragma once

namespace permugibbs {

/// OpenMP thread count, capped by PERMUGIBBS_THREADS when set.
int thread_budget();

}  // namespace permugibbs
