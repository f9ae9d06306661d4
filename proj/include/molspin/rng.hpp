#pragma once
// Independent random streams keyed by (master seed, stream index). Results never depend on
// which thread draws from which stream.

#include <cstdint>
#include <random>

namespace molspin {

inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0x6d6f6c73u};
  return std::mt19937_64(seq);
}

// Uniform double in [0, 1) from the top 53 bits; std::uniform_real_distribution is not
// specified bit-for-bit across standard libraries.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

}  // namespace molspin
