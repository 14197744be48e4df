#pragma once

namespace kb {

/// Thread count for parallel regions: OpenMP's default, capped by KEPLER_BALANCE_THREADS when set
/// to a positive integer.
int thread_count();

enum class Execution { serial, parallel };

}  // namespace kb
