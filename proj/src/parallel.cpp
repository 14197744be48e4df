#include "kepler_balance/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace kb {

int thread_count() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("KEPLER_BALANCE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) n = std::min(n, cap);
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return std::max(1, n);
}

}  // namespace kb
