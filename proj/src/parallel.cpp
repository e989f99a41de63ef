#include "permugibbs/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>

namespace permugibbs {

int thread_budget() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("PERMUGIBBS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(n, 1);
}

}  // namespace permugibbs
