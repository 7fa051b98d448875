// SPDX-License-Identifier: Apache-2.0
//
// Packet layout, in samples:
//
//   | PN | PN | pause (zeros) | body_1 | guard_1 | ... | body_n | guard_n |
//
// The two training halves are identical so the receiver can read the
// carrier offset from their phase difference. Guards are zero padding.
#pragma once

#include "mcdm/chirp_basis.hpp"
#include "mcdm/constellation.hpp"
#include "mcdm/frame.hpp"
#include "mcdm/pn.hpp"
#include "mcdm/types.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcdm {

/// Whole number of samples closest to `seconds` at `sample_rate`.
inline std::size_t duration_to_samples(double seconds, double sample_rate) {
    if (!(seconds >= 0.0) || !std::isfinite(seconds)) throw std::invalid_argument("duration must be non-negative");
    return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

struct PacketSpec {
    std::size_t pn_half = 0;  ///< N_pn, chips per training half
    std::size_t pause = 0;    ///< samples of silence after training
    std::size_t guard = 0;    ///< zero-padding samples after every body
    std::size_t symbols = 1;  ///< MCDM symbols per packet
    std::uint64_t pn_seed = 1;
    FrameLayout layout;
    Constellation constellation;

    /// Both training halves back to back.
    std::vector<double> training() const {
        std::vector<double> half = gen_pn(pn_half, pn_seed);
        std::vector<double> full(half);
        full.insert(full.end(), half.begin(), half.end());
        return full;
    }

    std::size_t training_length() const { return 2 * pn_half; }
    std::size_t symbol_stride() const { return layout.subcarriers() + guard; }
    std::size_t payload_bits() const { return symbols * layout.data_count() * constellation.bits_per_symbol(); }
    /// Offset of body i from the packet start.
    std::size_t body_offset(std::size_t i) const { return training_length() + pause + i * symbol_stride(); }
    std::size_t length() const { return body_offset(symbols); }
};

/// IOCT of one frame followed by `guard` zeros.
inline BasebandSignal synthesize_symbol(const FrequencyFrame& frame, const ChirpBasis& basis, std::size_t guard) {
    BasebandSignal out;
    out.samples = ioct_inverse(basis, frame);
    out.samples.resize(basis.size() + guard);
    out.sample_rate = basis.params().sample_rate();
    out.active = {Span{0, basis.size()}};
    return out;
}

/// Assemble one packet and scale it by `amplitude` (sqrt(E)).
inline BasebandSignal build_packet(std::span<const std::uint8_t> payload_bits, const PacketSpec& spec,
                                   const ChirpBasis& basis, double amplitude) {
    if (spec.layout.subcarriers() != basis.size())
        throw std::invalid_argument("build_packet: layout and basis disagree on the subcarrier count");
    if (spec.pn_half == 0) throw std::invalid_argument("build_packet: empty training sequence");
    if (payload_bits.size() != spec.payload_bits())
        throw std::invalid_argument("build_packet: payload has " + std::to_string(payload_bits.size()) +
                                    " bits, packet carries " + std::to_string(spec.payload_bits()));

    BasebandSignal out;
    out.sample_rate = basis.params().sample_rate();
    out.samples.assign(spec.length(), cf64{});
    out.active.push_back(Span{0, spec.training_length()});

    const std::vector<double> pn = spec.training();
    for (std::size_t n = 0; n < pn.size(); ++n) out.samples[n] = amplitude * pn[n];

    const std::size_t bits_per_frame = spec.layout.data_count() * spec.constellation.bits_per_symbol();
    for (std::size_t i = 0; i < spec.symbols; ++i) {
        const CVec data = map_bits(payload_bits.subspan(i * bits_per_frame, bits_per_frame), spec.constellation);
        const CVec body = ioct_inverse(basis, build_frame(data, spec.layout));
        const std::size_t at = spec.body_offset(i);
        for (std::size_t n = 0; n < body.size(); ++n) out.samples[at + n] = amplitude * body[n];
        out.active.push_back(Span{at, at + body.size()});
    }
    return out;
}

}  // namespace mcdm
