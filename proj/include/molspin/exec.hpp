#pragma once

namespace molspin {

// Kernels come in an OpenMP version and a plain serial reference; both must agree bit-for-bit
// wherever the reduction order is fixed.
enum class Exec { Serial, Parallel };

}  // namespace molspin
