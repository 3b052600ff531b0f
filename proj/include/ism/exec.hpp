#pragma once

namespace ism {

/// Selects between the OpenMP kernel and its serial reference. Both paths
/// produce identical results; the serial one exists for testing and for the
/// benchmark comparison.
enum class Exec { serial, parallel };

/// Number of worker threads the parallel kernels will use (1 without OpenMP).
int worker_threads();

}  // namespace ism
