#include "isee/rng.hpp"

#include <cmath>
#include <numbers>

namespace isee::rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline std::uint64_t to_u64(std::uint32_t lo, std::uint32_t hi) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

}  // namespace

std::array<std::uint32_t, 4> philox_block(std::uint64_t seed, std::uint64_t stream,
                                          std::uint64_t block) {
    std::array<std::uint32_t, 4> ctr{
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        const std::array<std::uint32_t, 4> next{
            static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
            static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
            static_cast<std::uint32_t>(p0)};
        ctr = next;
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return ctr;
}

double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const auto out = philox_block(seed, stream, index >> 1);
    const std::uint64_t word =
        (index & 1) ? to_u64(out[2], out[3]) : to_u64(out[0], out[1]);
    // (word + 1) / 2^64 lies in (0, 1]; safe under log().
    return (static_cast<double>(word) + 1.0) * 0x1p-64;
}

double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const auto out = philox_block(seed, stream, index >> 1);
    const double u1 = (static_cast<double>(to_u64(out[0], out[1])) + 1.0) * 0x1p-64;
    const double u2 = static_cast<double>(to_u64(out[2], out[3])) * 0x1p-64;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (index & 1) ? radius * std::sin(angle) : radius * std::cos(angle);
}

}  // namespace isee::rng
