// SPDX-License-Identifier: Apache-2.0
//
// Closed-form references for the simulator: uncoded AWGN bit error rates,
// the pre-detection SNR to Eb/N0 conversion used by the harness, and the
// payload bit-rate table.
#pragma once

#include "mcdm/config.hpp"
#include "mcdm/constellation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mcdm {

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// Nearest-neighbor bit error approximation for a labeled constellation:
///
///   BER ~ 1/(M b) * sum_i sum_{j in NN(i)} hamming(i, j) * Q(sqrt(d_min^2 Es / (2 N0)))
///
/// with Es/N0 = b Eb/N0. Exact for BPSK and Gray QPSK; a tight
/// approximation for the others once Eb/N0 is above roughly 6 dB.
inline double nearest_neighbor_ber(const Constellation& c, double ebn0_linear) {
    const CVec& pts = c.points();
    double dmin2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) dmin2 = std::min(dmin2, std::norm(pts[i] - pts[j]));
    double weight = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (i != j && std::norm(pts[i] - pts[j]) < dmin2 * (1.0 + 1e-9))
                weight += static_cast<double>(std::popcount(static_cast<unsigned>(i ^ j)));
    const double b = static_cast<double>(c.bits_per_symbol());
    weight /= static_cast<double>(pts.size()) * b;
    return weight * q_function(std::sqrt(dmin2 * b * ebn0_linear / 2.0));
}

/// Uncoded AWGN bit error rate at the given Eb/N0. BPSK and QPSK use the
/// exact Q(sqrt(2 Eb/N0)); 8PSK, 16QAM and 32QAM use the nearest-neighbor
/// form above (valid for Eb/N0 >= ~6 dB).
inline double theoretical_ber(Scheme scheme, double ebn0_db) {
    if (ebn0_db == std::numeric_limits<double>::infinity()) return 0.0;
    const double g = std::pow(10.0, ebn0_db / 10.0);
    switch (scheme) {
        case Scheme::Bpsk:
        case Scheme::Qpsk: return q_function(std::sqrt(2.0 * g));
        case Scheme::Psk8:
        case Scheme::Qam16:
        case Scheme::Qam32: return nearest_neighbor_ber(Constellation(scheme), g);
    }
    throw std::invalid_argument("theoretical_ber: unsupported scheme");
}

/// SNR_dB - Eb/N0_dB for the detector of this configuration:
///
///   offset = 10 log10( b * P_avg * (N + G) / N )
///
/// SNR is the mean received power over training and symbol bodies divided
/// by the per-sample noise variance. With unit-energy pilots and data,
///   P_avg = (2 N_pn + n (K_p + K_s)) / (2 N_pn + n N),
/// n being the symbols per packet. Folding the guard onto the body adds G
/// noise samples to every N-sample body, raising the per-subcarrier noise
/// by (N + G) / N. Eb is the energy per payload bit on a data subcarrier.
inline double ebn0_offset_db(const SystemConfig& config, Scheme scheme) {
    const double n_body = static_cast<double>(config.subcarriers);
    const double guard = static_cast<double>(config.guard_samples());
    const double training = 2.0 * static_cast<double>(config.pn_half_samples());
    const double symbols = static_cast<double>(config.symbols);
    const double active_bins = static_cast<double>(config.subcarriers - config.nulls);
    const double p_avg = (training + symbols * active_bins) / (training + symbols * n_body);
    const double b = static_cast<double>(Constellation(scheme).bits_per_symbol());
    return 10.0 * std::log10(b * p_avg * (n_body + guard) / n_body);
}

inline double snr_to_ebn0(double snr_db, const SystemConfig& config, Scheme scheme) {
    return snr_db - ebn0_offset_db(config, scheme);
}

inline double ebn0_to_snr(double ebn0_db, const SystemConfig& config, Scheme scheme) {
    return ebn0_db + ebn0_offset_db(config, scheme);
}

struct RateRow {
    Scheme scheme;
    double bits_per_second;
};

/// K_s / (T + T_g) * bits_per_symbol for every scheme in the sweep list,
/// using the nominal symbol and guard durations.
inline std::vector<RateRow> report_rates(const SystemConfig& config) {
    const double data = static_cast<double>(config.subcarriers - config.pilots - config.nulls);
    const double period = config.nominal_symbol_duration() + config.guard_s;
    std::vector<RateRow> rows;
    for (Scheme s : config.sweep.schemes)
        rows.push_back({s, data / period * static_cast<double>(Constellation(s).bits_per_symbol())});
    return rows;
}

}  // namespace mcdm
