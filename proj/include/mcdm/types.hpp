// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mcdm {

using cf64 = std::complex<double>;
using CVec = std::vector<cf64>;

/// Bit vector, one element per bit, values 0 or 1.
using Bits = std::vector<std::uint8_t>;

/// Half-open sample range [begin, end).
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const { return end - begin; }
    bool operator==(const Span&) const = default;
};

/// Complex baseband samples at a known rate.
///
/// `active` lists the spans that carry transmitted energy (training and
/// symbol bodies). It is what the SNR convention measures power over;
/// empty means "the whole signal".
struct BasebandSignal {
    CVec samples;
    double sample_rate = 0.0;
    std::vector<Span> active;

    std::size_t size() const { return samples.size(); }
};

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace mcdm
