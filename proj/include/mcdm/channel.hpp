// SPDX-License-Identifier: Apache-2.0
//
// Tapped-delay-line multipath channel with carrier offset, timing offset and
// additive white Gaussian noise, all at complex baseband.
//
// Tap gains are drawn with uniform phase, so the carrier phase term
// exp(-j 2 pi f_c tau_m) is statistically absorbed into them and the
// carrier frequency never enters the simulation.
#pragma once

#include "mcdm/rng.hpp"
#include "mcdm/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcdm {

enum class Fading { Fixed, RayleighBlock };

struct ChannelProfile {
    std::vector<std::size_t> delays;  ///< samples, strictly ascending, first is 0
    std::vector<double> powers;       ///< mean tap powers, linear, sum to 1
    Fading fading = Fading::RayleighBlock;

    std::size_t taps() const { return delays.size(); }
    std::size_t max_delay() const { return delays.empty() ? 0 : delays.back(); }

    void validate() const {
        if (delays.empty() || delays.size() != powers.size())
            throw std::invalid_argument("ChannelProfile: need matching, non-empty delay and power lists");
        if (delays.front() != 0) throw std::invalid_argument("ChannelProfile: first tap must have zero delay");
        for (std::size_t i = 1; i < delays.size(); ++i)
            if (delays[i] <= delays[i - 1]) throw std::invalid_argument("ChannelProfile: delays must ascend strictly");
        for (double p : powers)
            if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("ChannelProfile: powers must be positive");
        const double total = std::accumulate(powers.begin(), powers.end(), 0.0);
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("ChannelProfile: powers sum to " + std::to_string(total) + ", expected 1");
    }

    /// Single fixed unit tap.
    static ChannelProfile identity() { return {{0}, {1.0}, Fading::Fixed}; }

    /// Builds a profile from powers in dB relative to any reference;
    /// normalizes to unit total power.
    static ChannelProfile from_db(std::vector<std::size_t> delays, const std::vector<double>& powers_db, Fading f) {
        std::vector<double> lin;
        for (double db : powers_db) lin.push_back(std::pow(10.0, db / 10.0));
        return normalized(std::move(delays), std::move(lin), f);
    }

    static ChannelProfile normalized(std::vector<std::size_t> delays, std::vector<double> powers, Fading f) {
        const double total = std::accumulate(powers.begin(), powers.end(), 0.0);
        if (!(total > 0.0)) throw std::invalid_argument("ChannelProfile: zero total power");
        for (double& p : powers) p /= total;
        ChannelProfile out{std::move(delays), std::move(powers), f};
        out.validate();
        return out;
    }

    /// Three resolvable paths, exponentially decaying (0, -3, -6 dB) at
    /// delays 0, 4 and 9 samples, Rayleigh block fading.
    static ChannelProfile default_multipath() { return from_db({0, 4, 9}, {0.0, -3.0, -6.0}, Fading::RayleighBlock); }
};

/// One draw of the propagation environment, held for a whole packet.
struct ChannelRealization {
    CVec taps;
    std::vector<std::size_t> delays;
    double cfo_hz = 0.0;
    std::size_t timing_offset = 0;
    double snr_db = std::numeric_limits<double>::infinity();

    std::size_t max_delay() const { return delays.empty() ? 0 : *std::max_element(delays.begin(), delays.end()); }
};

inline ChannelRealization draw_realization(const ChannelProfile& profile, RngStream& rng, double snr_db,
                                           double cfo_hz, std::size_t timing_offset) {
    profile.validate();
    ChannelRealization r;
    r.delays = profile.delays;
    r.cfo_hz = cfo_hz;
    r.timing_offset = timing_offset;
    r.snr_db = snr_db;
    for (double p : profile.powers)
        r.taps.push_back(profile.fading == Fading::Fixed ? cf64{std::sqrt(p), 0.0} : rng.complex_normal(p));
    return r;
}

/// Multipath convolution, then `timing_offset` leading zeros, then the
/// carrier offset rotation exp(j 2 pi cfo n / f_s) over the whole output.
inline BasebandSignal apply_channel(const BasebandSignal& signal, const ChannelRealization& real) {
    if (signal.samples.empty()) throw std::invalid_argument("apply_channel: empty signal");
    if (real.taps.size() != real.delays.size()) throw std::invalid_argument("apply_channel: taps/delays mismatch");
    const std::size_t shift = real.timing_offset;
    BasebandSignal out;
    out.sample_rate = signal.sample_rate;
    out.samples.assign(signal.size() + real.max_delay() + shift, cf64{});
    for (std::size_t m = 0; m < real.taps.size(); ++m) {
        const cf64 g = real.taps[m];
        const std::size_t d = real.delays[m] + shift;
        for (std::size_t n = 0; n < signal.size(); ++n) out.samples[n + d] += g * signal.samples[n];
    }
    if (real.cfo_hz != 0.0) {
        const double w = 2.0 * kPi * real.cfo_hz / signal.sample_rate;
        for (std::size_t n = 0; n < out.size(); ++n) out.samples[n] *= std::polar(1.0, w * static_cast<double>(n));
    }
    for (Span s : signal.active) out.active.push_back(Span{s.begin + shift, s.end + shift});
    return out;
}

/// Mean power over the active spans (the whole signal if none are listed).
inline double active_power(const BasebandSignal& signal) {
    double energy = 0.0;
    std::size_t count = 0;
    auto accumulate_span = [&](std::size_t b, std::size_t e) {
        for (std::size_t n = b; n < e; ++n) energy += std::norm(signal.samples[n]);
        count += e - b;
    };
    if (signal.active.empty()) {
        accumulate_span(0, signal.size());
    } else {
        for (Span s : signal.active) {
            if (s.end > signal.size() || s.begin > s.end) throw std::invalid_argument("active span out of range");
            accumulate_span(s.begin, s.end);
        }
    }
    return count ? energy / static_cast<double>(count) : 0.0;
}

/// Per-sample complex noise variance that puts `signal_power` at `snr_db`.
inline double noise_variance(double signal_power, double snr_db) {
    if (!(signal_power > 0.0)) throw std::invalid_argument("noise_variance: signal has no power");
    if (snr_db == std::numeric_limits<double>::infinity()) return 0.0;
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

/// Adds complex Gaussian noise of the given per-sample variance. Draws one
/// unit normal pair per sample even when the variance is zero, so streams
/// stay aligned across SNR points.
inline void add_noise(BasebandSignal& signal, double variance, RngStream& rng) {
    const double s = std::sqrt(variance / 2.0);
    for (cf64& x : signal.samples) {
        const double re = rng.normal();
        const double im = rng.normal();
        x += cf64{s * re, s * im};
    }
}

/// AWGN at a pre-detection SNR measured over the signal's active spans.
/// `snr_db = +inf` leaves the signal untouched.
inline BasebandSignal add_awgn(const BasebandSignal& signal, double snr_db, RngStream& rng) {
    const double p = active_power(signal);
    if (!(p > 0.0)) throw std::invalid_argument("add_awgn: signal has zero power");
    BasebandSignal out = signal;
    if (snr_db == std::numeric_limits<double>::infinity()) return out;
    add_noise(out, noise_variance(p, snr_db), rng);
    return out;
}

}  // namespace mcdm
