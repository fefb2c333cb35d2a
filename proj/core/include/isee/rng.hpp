#pragma once

#include <array>
#include <cstdint>

// Counter-based random streams (Philox4x32-10, Salmon et al. 2011).
// Every draw is a pure function of (seed, stream, index), so parallel
// consumers get identical numbers no matter how work is scheduled.

namespace isee::rng {

/// One 128-bit Philox4x32-10 block for key = seed, counter = (stream, block).
std::array<std::uint32_t, 4> philox_block(std::uint64_t seed, std::uint64_t stream,
                                          std::uint64_t block);

/// Uniform draw in (0,1], the `index`-th of stream (seed, stream).
double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Standard normal draw, the `index`-th of stream (seed, stream).
/// Box-Muller on consecutive Philox blocks; index i and i^1 share a block.
double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Rademacher +-1 draw.
inline double rademacher(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    return uniform01(seed, stream, index) <= 0.5 ? -1.0 : 1.0;
}

// Stream-id tags keeping independent uses of one user seed apart.
// Noise paths own the untagged low range: stream == path_index.
enum class Domain : std::uint64_t {
    noise   = 0,
    audit   = 1,
    search  = 2,
    mc_aux  = 3,
};

inline std::uint64_t stream_id(Domain d, std::uint64_t index) {
    return (static_cast<std::uint64_t>(d) << 56) | (index & 0x00ffffffffffffffULL);
}

}  // namespace isee::rng
