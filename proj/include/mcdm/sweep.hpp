// SPDX-License-Identifier: Apache-2.0
//
// Monte-Carlo BER sweep.
//
// Every trial is a pure function of (master seed, trial index, scheme):
// payload bits come from a stream keyed by (seed, scheme, trial), the
// channel draw and the unit noise vector from streams keyed by (seed,
// trial) only. All SNR points and both systems therefore see the same
// channels and noise shapes (common random numbers); only the noise scale
// changes with SNR. Trials run in parallel batches and are merged in trial
// order, so thread count and scheduling never change the results.
#pragma once

#include "mcdm/channel.hpp"
#include "mcdm/chirp_basis.hpp"
#include "mcdm/config.hpp"
#include "mcdm/receiver.hpp"
#include "mcdm/rng.hpp"
#include "mcdm/transmitter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

namespace mcdm {

struct BerRecord {
    System system = System::Mcdm;
    Scheme scheme = Scheme::Bpsk;
    double snr_db = 0.0;
    std::uint64_t bits_sent = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    std::uint64_t packets = 0;
    double wall_time_s = 0.0;
    std::uint64_t seed = 0;
};

/// One simulated packet.
struct TrialOutcome {
    std::uint64_t trial = 0;
    std::size_t bits = 0;
    std::size_t bit_errors = 0;
    PacketReport report;
};

namespace stream_key {
inline constexpr std::uint64_t kPayload = 1;
inline constexpr std::uint64_t kChannel = 2;
inline constexpr std::uint64_t kNoise = 3;
}  // namespace stream_key

/// Everything a trial needs that does not change between trials of a cell.
class LinkSimulator {
public:
    LinkSimulator(const SystemConfig& config, System system, Scheme scheme)
        : config_(config), system_(system), scheme_(scheme), basis_(config.waveform(system)),
          spec_(config.packet_spec(scheme)) {}

    const ChirpBasis& basis() const { return basis_; }
    const PacketSpec& spec() const { return spec_; }

    TrialOutcome run(double snr_db, std::uint64_t trial) const {
        const std::uint64_t seed = config_.sweep.seed;
        RngStream payload_rng =
            RngStream::derive(seed, {stream_key::kPayload, static_cast<std::uint64_t>(scheme_), trial});
        Bits bits(spec_.payload_bits());
        for (auto& b : bits) b = payload_rng.bit();

        const BasebandSignal tx = build_packet(bits, spec_, basis_, config_.amplitude);

        RngStream channel_rng = RngStream::derive(seed, {stream_key::kChannel, trial});
        const ChannelRealization real =
            draw_realization(config_.channel, channel_rng, snr_db, config_.cfo_hz, config_.timing_offset);
        BasebandSignal rx = apply_channel(tx, real);

        // Average SNR: transmit power times the profile's mean gain (1).
        const double mean_gain = std::accumulate(config_.channel.powers.begin(), config_.channel.powers.end(), 0.0);
        RngStream noise_rng = RngStream::derive(seed, {stream_key::kNoise, trial});
        add_noise(rx, noise_variance(active_power(tx) * mean_gain, snr_db), noise_rng);

        const GenieChannel genie{real, config_.amplitude};
        TrialOutcome out;
        out.trial = trial;
        out.bits = bits.size();
        out.report = receive_packet(rx, spec_, basis_, config_.receiver, std::span<const std::uint8_t>(bits), &genie);
        // A missed packet delivers nothing; score it as a coin-flip guess of
        // every payload bit.
        out.bit_errors = out.report.detected ? out.report.bit_errors : bits.size() / 2;
        return out;
    }

private:
    const SystemConfig& config_;
    System system_;
    Scheme scheme_;
    ChirpBasis basis_;
    PacketSpec spec_;
};

struct SweepCallbacks {
    /// Called once per finished cell.
    std::function<void(const BerRecord&)> on_record;
    /// Called for every packet that counts towards a record, in trial order.
    std::function<void(const BerRecord& cell, const TrialOutcome&)> on_packet;
};

namespace detail {

inline std::size_t worker_count(const SweepSettings& s) {
    if (s.threads > 0) return s.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace detail

/// Runs one (system, scheme, SNR) cell. A cell stops once it has both
/// `min_bit_errors` errors and `min_bits` bits, or at `packets_per_point`
/// packets, whichever comes first.
inline BerRecord run_ber_cell(const SystemConfig& config, const LinkSimulator& sim, System system, Scheme scheme,
                              double snr_db, const SweepCallbacks& callbacks = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    const SweepSettings& s = config.sweep;
    BerRecord rec;
    rec.system = system;
    rec.scheme = scheme;
    rec.snr_db = snr_db;
    rec.seed = s.seed;

    const std::size_t workers = detail::worker_count(s);
    const std::size_t batch = std::max<std::size_t>(8, 4 * workers);
    std::uint64_t next = 0;
    bool done = false;
    std::vector<TrialOutcome> outcomes;
    while (!done) {
        const std::size_t n = std::min<std::size_t>(batch, s.packets_per_point - next);
        outcomes.assign(n, {});
        auto work = [&](std::size_t w) {
            for (std::size_t i = w; i < n; i += workers) outcomes[i] = sim.run(snr_db, next + i);
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(work, w);
        }
        for (const TrialOutcome& o : outcomes) {
            rec.packets += 1;
            rec.bits_sent += o.bits;
            rec.bit_errors += o.bit_errors;
            if (callbacks.on_packet) callbacks.on_packet(rec, o);
            const bool enough = rec.bit_errors >= s.min_bit_errors && rec.bits_sent >= s.min_bits;
            if (enough || rec.packets >= s.packets_per_point) {
                done = true;
                break;
            }
        }
        next += n;
    }
    rec.ber = rec.bits_sent ? static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits_sent) : 0.0;
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (callbacks.on_record) callbacks.on_record(rec);
    return rec;
}

/// Every (system, scheme, SNR) cell of the configuration, in that nesting
/// order.
inline std::vector<BerRecord> run_ber_sweep(const SystemConfig& config, const SweepCallbacks& callbacks = {}) {
    config.validate();
    std::vector<BerRecord> records;
    for (System system : config.sweep.systems) {
        for (Scheme scheme : config.sweep.schemes) {
            const LinkSimulator sim(config, system, scheme);
            for (double snr : config.sweep.snr_db) records.push_back(run_ber_cell(config, sim, system, scheme, snr, callbacks));
        }
    }
    return records;
}

/// True if BER never rises with SNR, except for at most `allowed` rises
/// each within two binomial standard deviations of the previous point.
inline bool ber_monotone(const std::vector<BerRecord>& curve, std::size_t allowed = 1) {
    std::size_t inversions = 0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const BerRecord& a = curve[i - 1];
        const BerRecord& b = curve[i];
        if (b.ber <= a.ber) continue;
        const double pa = a.ber, pb = b.ber;
        const double sigma = std::sqrt(pa * (1 - pa) / static_cast<double>(std::max<std::uint64_t>(a.bits_sent, 1)) +
                                       pb * (1 - pb) / static_cast<double>(std::max<std::uint64_t>(b.bits_sent, 1)));
        if (b.ber - a.ber > 2.0 * sigma) return false;
        if (++inversions > allowed) return false;
    }
    return true;
}

}  // namespace mcdm
