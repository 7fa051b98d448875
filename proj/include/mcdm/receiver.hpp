// SPDX-License-Identifier: Apache-2.0
//
// Receiver chain: training-sequence packet sync, two-half carrier offset
// estimation and removal, zero-padding restoration plus OCT per symbol,
// comb-pilot least-squares channel estimation with linear interpolation,
// and one-tap minimum-distance detection per subcarrier.
#pragma once

#include "mcdm/chirp_basis.hpp"
#include "mcdm/channel.hpp"
#include "mcdm/constellation.hpp"
#include "mcdm/frame.hpp"
#include "mcdm/transmitter.hpp"
#include "mcdm/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcdm {

// ---------------------------------------------------------------------------
// Packet synchronization

struct SyncResult {
    std::size_t t_hat = 0;     ///< lag of the correlation peak, samples
    double peak_metric = 0.0;  ///< |R| at the peak over its Cauchy-Schwarz bound, in [0, 1]
    bool detected = false;
};

/// Correlates the known training sequence against `rx` at lags
/// 0 .. window-1 and picks the largest |R(tau)|, first index on ties. The
/// peak is normalized by sqrt(sum ref^2 * sum |rx|^2) over the same samples,
/// so an undistorted copy of the training scores exactly 1.
inline SyncResult synchronize(std::span<const cf64> rx, std::span<const double> reference, std::size_t window,
                              double threshold) {
    if (reference.empty()) throw std::invalid_argument("synchronize: empty reference");
    if (window == 0 || window - 1 + reference.size() > rx.size())
        throw std::invalid_argument("synchronize: search window of " + std::to_string(window) +
                                    " lags does not fit in " + std::to_string(rx.size()) + " received samples");
    double ref_energy = 0.0;
    for (double c : reference) ref_energy += c * c;

    SyncResult best;
    double best_mag = -1.0;
    for (std::size_t tau = 0; tau < window; ++tau) {
        cf64 acc{};
        for (std::size_t n = 0; n < reference.size(); ++n) acc += reference[n] * std::conj(rx[tau + n]);
        const double mag = std::abs(acc);
        if (mag > best_mag) {
            best_mag = mag;
            best.t_hat = tau;
        }
    }
    double rx_energy = 0.0;
    for (std::size_t n = 0; n < reference.size(); ++n) rx_energy += std::norm(rx[best.t_hat + n]);
    const double bound = std::sqrt(ref_energy * rx_energy);
    best.peak_metric = bound > 0.0 ? best_mag / bound : 0.0;
    best.detected = best.peak_metric >= threshold;
    return best;
}

// ---------------------------------------------------------------------------
// Carrier frequency offset

struct CfoEstimate {
    double delta_f_hat = 0.0;  ///< Hz
};

/// Phase of sum conj(r[n]) r[n + N_half] over the first half, scaled by
/// 1 / (pi T_pn) with T_pn = 2 N_half / f_s. Unambiguous for
/// |delta_f| < 1 / T_pn; larger offsets alias modulo 2 / T_pn.
///
/// `trim` drops that many lags at both ends of the sum. Under multipath the
/// head of the first half is preceded by silence while the head of the
/// second half is preceded by the first half, so those samples differ by
/// more than the carrier rotation; the tail has the same problem with
/// paths that arrive ahead of the sync point.
inline CfoEstimate estimate_cfo(std::span<const cf64> pn_rx, double sample_rate, std::size_t trim = 0) {
    if (pn_rx.size() < 2 || pn_rx.size() % 2 != 0)
        throw std::invalid_argument("estimate_cfo: need both training halves (even, non-zero length)");
    const std::size_t half = pn_rx.size() / 2;
    if (2 * trim >= half) throw std::invalid_argument("estimate_cfo: trim leaves no samples to correlate");
    cf64 acc{};
    for (std::size_t n = trim; n < half - trim; ++n) acc += std::conj(pn_rx[n]) * pn_rx[n + half];
    if (std::abs(acc) == 0.0) throw std::runtime_error("estimate_cfo: zero correlation, no signal in training");
    const double t_pn = static_cast<double>(pn_rx.size()) / sample_rate;
    return {std::arg(acc) / (kPi * t_pn)};
}

/// Multiplies sample n by exp(-j 2 pi delta_f_hat n / f_s).
inline BasebandSignal compensate_cfo(const BasebandSignal& rx, CfoEstimate est) {
    BasebandSignal out = rx;
    if (est.delta_f_hat == 0.0) return out;
    const double w = -2.0 * kPi * est.delta_f_hat / rx.sample_rate;
    for (std::size_t n = 0; n < out.size(); ++n) out.samples[n] *= std::polar(1.0, w * static_cast<double>(n));
    return out;
}

// ---------------------------------------------------------------------------
// Symbol demodulation

/// Turns a received body-plus-guard segment back into a spectrum.
///
/// The segment starts `lead` samples before the nominal body start. Every
/// sample is dechirped with the chirp phase continued past both ends of the
/// body (t = 0 stays at the body start), folded modulo N onto the body, and
/// transformed with the DFT. Folding the guard tail restores the circular
/// structure that zero padding breaks; dechirping before folding keeps a
/// delayed chirp a pure tone, so the channel stays close to diagonal. The
/// lead window catches energy that lands early when the sync point is on a
/// later path. For mu = 0 and lead = 0 this is plain overlap-add and a DFT.
class SymbolDemodulator {
public:
    SymbolDemodulator(const ChirpBasis& basis, std::size_t guard, std::size_t lead = 0)
        : basis_(&basis), guard_(guard), lead_(lead), dechirp_(basis.size() + guard), fold_(basis.size() + guard) {
        const long n_total = static_cast<long>(basis.size());
        for (std::size_t i = 0; i < dechirp_.size(); ++i) {
            const long m = static_cast<long>(i) - static_cast<long>(lead);
            dechirp_[i] = basis.dechirp_at(m);
            fold_[i] = static_cast<std::size_t>(((m % n_total) + n_total) % n_total);
        }
    }

    std::size_t segment_length() const { return dechirp_.size(); }
    std::size_t guard() const { return guard_; }
    std::size_t lead() const { return lead_; }

    Spectrum operator()(std::span<const cf64> segment) const {
        if (segment.size() < segment_length())
            throw std::invalid_argument("demodulate_symbol: segment of " + std::to_string(segment.size()) +
                                        " samples, need " + std::to_string(segment_length()));
        Spectrum y{CVec(basis_->size())};
        for (std::size_t i = 0; i < dechirp_.size(); ++i) y.coeffs[fold_[i]] += segment[i] * dechirp_[i];
        basis_->fft().forward(y.coeffs, y.coeffs);
        return y;
    }

private:
    const ChirpBasis* basis_;
    std::size_t guard_;
    std::size_t lead_;
    CVec dechirp_;
    std::vector<std::size_t> fold_;
};

inline Spectrum demodulate_symbol(std::span<const cf64> segment, const ChirpBasis& basis, std::size_t guard_len,
                                  std::size_t lead = 0) {
    return SymbolDemodulator(basis, guard_len, lead)(segment);
}

// ---------------------------------------------------------------------------
// Channel estimation

struct ChannelEstimate {
    CVec h_hat;            ///< one coefficient per subcarrier
    CVec pilot_estimates;  ///< LS estimates at the pilot comb
};

/// LS pilot estimates s_p * y_p; with antipodal pilots multiplying by the
/// pilot equals dividing by it.
inline CVec estimate_channel_pilots(const Spectrum& y, const FrameLayout& layout) {
    if (y.size() != layout.subcarriers()) throw std::invalid_argument("estimate_channel_pilots: length mismatch");
    CVec out(layout.pilot_count());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = layout.pilot_symbols()[i] * y[layout.pilot_indices()[i]];
    return out;
}

/// Linear interpolation between neighboring pilots. Past the last pilot
/// there is no right neighbor, so the last estimate is held.
inline ChannelEstimate interpolate_channel(std::span<const cf64> pilot_estimates, const FrameLayout& layout) {
    const std::size_t kp = layout.pilot_count();
    if (kp < 2) throw std::invalid_argument("interpolate_channel: need at least 2 pilots");
    if (pilot_estimates.size() != kp) throw std::invalid_argument("interpolate_channel: pilot count mismatch");
    const std::size_t spacing = layout.spacing();
    ChannelEstimate est;
    est.pilot_estimates.assign(pilot_estimates.begin(), pilot_estimates.end());
    est.h_hat.resize(layout.subcarriers());
    for (std::size_t k = 0; k < est.h_hat.size(); ++k) {
        const std::size_t group = k / spacing;
        const std::size_t l = k % spacing;
        if (l == 0) {
            est.h_hat[k] = pilot_estimates[group];
        } else if (group + 1 < kp) {
            const double w = static_cast<double>(l) / static_cast<double>(spacing);
            est.h_hat[k] = (1.0 - w) * pilot_estimates[group] + w * pilot_estimates[group + 1];
        } else {
            est.h_hat[k] = pilot_estimates[kp - 1];
        }
    }
    return est;
}

// ---------------------------------------------------------------------------
// Detection

/// Real-valued operation tally for the detector. Each candidate costs one
/// complex multiply (4 mul, 2 add), one complex subtract (2 add) and one
/// squared magnitude (2 mul, 1 add).
struct OpCounter {
    std::uint64_t multiplications = 0;
    std::uint64_t additions = 0;
};

struct DetectionResult {
    CVec symbols;                  ///< detected points, one per data subcarrier
    std::vector<unsigned> labels;  ///< their labels
    Bits bits;
    std::vector<bool> erasures;    ///< |h_hat| below the erasure threshold
};

inline constexpr double kErasureThreshold = 1e-8;

/// argmin over the alphabet of |y_k - h_k s|^2, independently per data
/// subcarrier. Ties go to the lowest label. Subcarriers with a dead channel
/// estimate are flagged and still decided on the raw metric.
inline DetectionResult detect_symbols(const Spectrum& y, const ChannelEstimate& est, const FrameLayout& layout,
                                      const Constellation& constellation, OpCounter* counter = nullptr) {
    if (y.size() != layout.subcarriers() || est.h_hat.size() != layout.subcarriers())
        throw std::invalid_argument("detect_symbols: shape mismatch");
    DetectionResult out;
    const std::size_t ks = layout.data_count();
    out.symbols.reserve(ks);
    out.labels.reserve(ks);
    out.erasures.reserve(ks);
    out.bits.reserve(ks * constellation.bits_per_symbol());
    const CVec& alphabet = constellation.points();
    for (std::size_t k : layout.data_indices()) {
        const cf64 yk = y[k];
        const cf64 hk = est.h_hat[k];
        unsigned best = 0;
        double best_d = 0.0;
        for (unsigned i = 0; i < alphabet.size(); ++i) {
            const double d = std::norm(yk - hk * alphabet[i]);
            if (i == 0 || d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (counter) {
            counter->multiplications += 6 * alphabet.size();
            counter->additions += 5 * alphabet.size();
        }
        out.labels.push_back(best);
        out.symbols.push_back(alphabet[best]);
        out.erasures.push_back(std::abs(hk) < kErasureThreshold);
        constellation.append_bits(best, out.bits);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Full packet

enum class CsiMode {
    Pilot,  ///< comb-pilot LS estimate with linear interpolation
    Ideal,  ///< genie: exact diagonal of the effective channel
};

struct ReceiverConfig {
    std::size_t sync_window = 512;  ///< lags searched, samples
    double sync_threshold = 0.5;
    /// Symbol windows open this many samples before the sync point so that
    /// paths arriving ahead of the strongest one stay inside the fold.
    std::size_t timing_backoff = 16;
    bool cfo_correction = true;
    /// Lags skipped at each end of the carrier offset correlation.
    std::size_t cfo_trim = 12;
    CsiMode csi = CsiMode::Pilot;
};

/// What a genie-aided receiver knows about the channel.
struct GenieChannel {
    ChannelRealization realization;
    double amplitude = 1.0;
};

/// Diagonal of the effective per-symbol channel seen by `SymbolDemodulator`
/// when the packet was synced at `t_hat`. A tap at effective delay e
/// (relative to the window's nominal body start) contributes
/// g * c(e) * exp(-j 2 pi k e / N), where c(e) is the subcarrier-independent
/// gain of a shifted chirp after dechirp and fold; c(e) is obtained by
/// demodulating a shifted psi_0. Carrier offset is not modeled.
inline CVec ideal_channel_response(const GenieChannel& genie, const ChirpBasis& basis,
                                   const SymbolDemodulator& demod, std::size_t t_hat) {
    const std::size_t n_total = basis.size();
    const CVec psi0 = basis.subcarrier(0);
    CVec h(n_total);
    const auto& real = genie.realization;
    for (std::size_t m = 0; m < real.taps.size(); ++m) {
        const long e = static_cast<long>(real.delays[m] + real.timing_offset) - static_cast<long>(t_hat);
        const long start = e + static_cast<long>(demod.lead());
        CVec segment(demod.segment_length());
        for (std::size_t n = 0; n < n_total; ++n) {
            const long at = start + static_cast<long>(n);
            if (at >= 0 && at < static_cast<long>(segment.size())) segment[static_cast<std::size_t>(at)] = psi0[n];
        }
        const cf64 c = demod(segment)[0];
        const cf64 g = genie.amplitude * real.taps[m] * c;
        for (std::size_t k = 0; k < n_total; ++k) {
            const long phase_idx = ((static_cast<long>(k) * e) % static_cast<long>(n_total) + static_cast<long>(n_total)) %
                                   static_cast<long>(n_total);
            h[k] += g * std::polar(1.0, -2.0 * kPi * static_cast<double>(phase_idx) / static_cast<double>(n_total));
        }
    }
    return h;
}

struct PacketReport {
    bool detected = false;
    bool truncated = false;  ///< synced, but the packet runs past the end of the capture
    SyncResult sync;
    CfoEstimate cfo;
    Bits bits;
    std::vector<ChannelEstimate> channel;  ///< per symbol
    bool has_reference = false;
    std::size_t bit_errors = 0;
    std::vector<std::size_t> symbol_bit_errors;
};

inline std::size_t count_bit_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("count_bit_errors: length mismatch");
    std::size_t errors = 0;
    for (std::size_t i = 0; i < a.size(); ++i) errors += (a[i] & 1u) != (b[i] & 1u);
    return errors;
}

/// sync -> CFO estimate/compensate -> per symbol: demodulate, estimate and
/// interpolate the channel, detect, demap. Pass the transmitted payload as
/// `reference` to get error counts. A missing or truncated packet comes back
/// with `detected == false` and no bits.
inline PacketReport receive_packet(const BasebandSignal& rx, const PacketSpec& spec, const ChirpBasis& basis,
                                   const ReceiverConfig& config,
                                   std::optional<std::span<const std::uint8_t>> reference = std::nullopt,
                                   const GenieChannel* genie = nullptr) {
    if (spec.layout.subcarriers() != basis.size())
        throw std::invalid_argument("receive_packet: layout and basis disagree on the subcarrier count");
    if (config.csi == CsiMode::Ideal && genie == nullptr)
        throw std::invalid_argument("receive_packet: ideal CSI needs the channel realization");
    if (reference && reference->size() != spec.payload_bits())
        throw std::invalid_argument("receive_packet: reference payload size mismatch");

    PacketReport report;
    const std::vector<double> training = spec.training();
    if (rx.size() < training.size()) return report;
    const std::size_t window = std::min(config.sync_window, rx.size() - training.size() + 1);
    report.sync = synchronize(rx.samples, training, window, config.sync_threshold);
    if (!report.sync.detected) return report;

    const std::size_t t_hat = report.sync.t_hat;
    const std::size_t lead = std::min(config.timing_backoff, t_hat + spec.body_offset(0));
    const SymbolDemodulator demod(basis, spec.guard, lead);
    if (t_hat + spec.body_offset(spec.symbols - 1) - lead + demod.segment_length() > rx.size()) {
        report.detected = false;
        report.truncated = true;
        return report;
    }
    report.detected = true;

    BasebandSignal corrected;
    const BasebandSignal* stream = &rx;
    if (config.cfo_correction) {
        report.cfo = estimate_cfo(std::span(rx.samples).subspan(t_hat, training.size()), rx.sample_rate,
                                  config.cfo_trim);
        corrected = compensate_cfo(rx, report.cfo);
        stream = &corrected;
    }

    CVec ideal;
    if (config.csi == CsiMode::Ideal) ideal = ideal_channel_response(*genie, basis, demod, t_hat);

    const std::size_t bits_per_frame = spec.layout.data_count() * spec.constellation.bits_per_symbol();
    report.bits.reserve(spec.payload_bits());
    for (std::size_t i = 0; i < spec.symbols; ++i) {
        const std::size_t start = t_hat + spec.body_offset(i) - lead;
        const Spectrum y = demod(std::span(stream->samples).subspan(start, demod.segment_length()));
        ChannelEstimate est;
        if (config.csi == CsiMode::Pilot) {
            est = interpolate_channel(estimate_channel_pilots(y, spec.layout), spec.layout);
        } else {
            est.h_hat = ideal;
            for (std::size_t k : spec.layout.pilot_indices()) est.pilot_estimates.push_back(ideal[k]);
        }
        const DetectionResult det = detect_symbols(y, est, spec.layout, spec.constellation);
        if (reference) {
            report.symbol_bit_errors.push_back(
                count_bit_errors(det.bits, reference->subspan(i * bits_per_frame, bits_per_frame)));
        }
        report.bits.insert(report.bits.end(), det.bits.begin(), det.bits.end());
        report.channel.push_back(std::move(est));
    }
    if (reference) {
        report.has_reference = true;
        for (std::size_t e : report.symbol_bit_errors) report.bit_errors += e;
    }
    return report;
}

}  // namespace mcdm
