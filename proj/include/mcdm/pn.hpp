// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mcdm {

/// Degree-10 maximal-length sequence (recurrence a[n+10] = a[n] ^ a[n+3],
/// characteristic polynomial x^10 + x^3 + 1, period 1023), cycled or
/// truncated to `length` chips and mapped 0 -> +1, 1 -> -1.
///
/// The low 10 bits of `seed` are the initial register; they must not all be
/// zero (the all-zero state never leaves itself).
inline std::vector<double> gen_pn(std::size_t length, std::uint64_t seed) {
    if (length == 0) throw std::invalid_argument("gen_pn: length must be positive");
    std::uint32_t state = static_cast<std::uint32_t>(seed & 0x3FFu);
    if (state == 0) throw std::invalid_argument("gen_pn: seed leaves the LFSR in the all-zero state");
    std::vector<double> chips(length);
    for (auto& chip : chips) {
        const std::uint32_t out = state & 1u;
        const std::uint32_t feedback = (state ^ (state >> 3)) & 1u;
        state = (state >> 1) | (feedback << 9);
        chip = out ? -1.0 : 1.0;
    }
    return chips;
}

inline constexpr std::size_t kPnPeriod = 1023;

}  // namespace mcdm
