#pragma once

namespace strassen {

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// path the tests compare against.
enum class Exec { serial, parallel };

/// Thread count for parallel kernels: OpenMP's default, capped by the
/// STRASSEN_LAB_THREADS environment variable when it holds a positive integer.
int thread_budget();

}  // namespace strassen
