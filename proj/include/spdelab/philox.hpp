#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

// Philox-4x32-10 counter-based generator (Salmon et al., SC 2011). A block is
// a pure function of (counter, key), so any lattice cell can be generated
// independently of every other cell and of thread scheduling.

namespace spdelab::rng {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hi_lo(kPhiloxM0, ctr[0], hi0, lo0);
    mul_hi_lo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    detail::philox_round(ctr, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += detail::kPhiloxW0;
        key[1] += detail::kPhiloxW1;
        detail::philox_round(ctr, key);
    }
    return ctr;
}

/// Uniform draw in (0,1] from 53 high bits (never 0, so log() is safe).
inline double uniform_open_closed(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

/// Uniform draw in [0,1).
inline double uniform_closed_open(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// One standard-normal draw for a lattice cell, keyed by
/// (seed, replica, time index, space index). Box-Muller on one Philox block.
inline double cell_normal(std::uint64_t seed, std::uint32_t replica,
                          std::uint32_t time_index, std::uint32_t space_index) {
    const std::array<std::uint32_t, 4> ctr = {time_index, space_index, replica, 0x53504445u};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const auto out = philox4x32(ctr, key);
    const std::uint64_t a = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    const std::uint64_t b = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    const double u1 = uniform_open_closed(a);
    const double u2 = uniform_closed_open(b);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace spdelab::rng
