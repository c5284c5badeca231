#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace conekernel::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;
inline constexpr int kPhiloxRounds = 10;

/// Philox4x32-10 block function (Salmon et al., counter-based).
constexpr Counter philox4x32(Counter ctr, Key key) noexcept {
    for (int round = 0; round < kPhiloxRounds; ++round) {
        if (round > 0) {
            key[0] += kPhiloxW0;
            key[1] += kPhiloxW1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

constexpr Key key_from_seed(std::uint64_t seed) noexcept {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// Uniform double in [0, 1) from the top 52 bits of a 64-bit word.
inline double unit_from_bits(std::uint64_t bits) noexcept {
    return std::bit_cast<double>((bits >> 12) | 0x3FF0000000000000ull) - 1.0;
}

/// Random stream addressing: one path, one time step, one purpose.
/// Counter layout is (path lo, path hi, step, tag) with tag = (substep << 8) | purpose.
enum class Purpose : std::uint32_t { normals = 0, bridge = 1 };

constexpr std::uint32_t make_tag(std::uint32_t substep, Purpose purpose) noexcept {
    return (substep << 8) | static_cast<std::uint32_t>(purpose);
}

constexpr Counter path_counter(std::uint64_t path, std::uint32_t step, std::uint32_t tag) noexcept {
    return {static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32), step, tag};
}

/// Two uniforms in [0, 1) for (path, step, tag).
inline std::array<double, 2> uniform_pair(Key key, std::uint64_t path, std::uint32_t step, std::uint32_t tag) noexcept {
    const Counter out = philox4x32(path_counter(path, step, tag), key);
    const std::uint64_t a = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    const std::uint64_t b = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    return {unit_from_bits(a), unit_from_bits(b)};
}

} // namespace conekernel::rng
