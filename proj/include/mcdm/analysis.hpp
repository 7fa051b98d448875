// SPDX-License-Identifier: Apache-2.0
//
// Basis diagnostics: Gram-matrix orthogonality and inter-subcarrier leakage
// of the effective channel after a delay.
#pragma once

#include "mcdm/channel.hpp"
#include "mcdm/chirp_basis.hpp"
#include "mcdm/receiver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mcdm {

struct OrthogonalityReport {
    double max_off_diagonal = 0.0;  ///< max |rho_mn|, m != n
    double max_diagonal_error = 0.0;  ///< max |rho_mm - 1|
};

/// Full Gram matrix of the sampled subcarriers, computed directly from the
/// inner-product definition. O(K^3); about a second at K = 1024.
inline OrthogonalityReport orthogonality_report(const ChirpBasis& basis) {
    const std::size_t k_total = basis.size();
    std::vector<CVec> psi(k_total);
    for (std::size_t k = 0; k < k_total; ++k) psi[k] = basis.subcarrier(k);
    OrthogonalityReport r;
    for (std::size_t m = 0; m < k_total; ++m) {
        const CVec& a = psi[m];
        for (std::size_t n = m; n < k_total; ++n) {
            const CVec& b = psi[n];
            double re = 0.0, im = 0.0;
            for (std::size_t i = 0; i < k_total; ++i) {
                // a * conj(b), expanded to keep the loop vectorizable.
                re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
                im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
            }
            const cf64 rho{re, im};
            if (m == n) r.max_diagonal_error = std::max(r.max_diagonal_error, std::abs(rho - 1.0));
            else r.max_off_diagonal = std::max(r.max_off_diagonal, std::abs(rho));
        }
    }
    return r;
}

struct LeakageReport {
    std::size_t delay = 0;
    double diagonal_energy = 0.0;   ///< sum_k |H_kk|^2
    double off_diagonal_energy = 0.0;  ///< sum_{j != k} |H_jk|^2
    double worst_subcarrier_ratio = 0.0;  ///< max over k of off_k / diag_k

    double ratio() const { return diagonal_energy > 0.0 ? off_diagonal_energy / diagonal_energy : 0.0; }
    double ratio_db() const { return 10.0 * std::log10(std::max(ratio(), 1e-300)); }
    double worst_subcarrier_db() const { return 10.0 * std::log10(std::max(worst_subcarrier_ratio, 1e-300)); }
};

/// Effective K x K channel matrix of a single unit path at `delay` samples,
/// as seen through `SymbolDemodulator` with the given guard and lead:
/// column k is the demodulated spectrum of psi_k delayed by `delay`.
inline LeakageReport channel_leakage(const ChirpBasis& basis, std::size_t guard, std::size_t delay,
                                     std::size_t lead = 0) {
    const SymbolDemodulator demod(basis, guard, lead);
    const std::size_t n_total = basis.size();
    LeakageReport r;
    r.delay = delay;
    CVec segment(demod.segment_length());
    for (std::size_t k = 0; k < n_total; ++k) {
        const CVec psi = basis.subcarrier(k);
        std::fill(segment.begin(), segment.end(), cf64{});
        for (std::size_t n = 0; n < n_total; ++n) {
            const std::size_t at = lead + delay + n;
            if (at < segment.size()) segment[at] = psi[n];
        }
        const Spectrum col = demod(segment);
        double diag = 0.0, off = 0.0;
        for (std::size_t j = 0; j < n_total; ++j) (j == k ? diag : off) += std::norm(col[j]);
        r.diagonal_energy += diag;
        r.off_diagonal_energy += off;
        r.worst_subcarrier_ratio = std::max(r.worst_subcarrier_ratio, diag > 0.0 ? off / diag : 1e300);
    }
    return r;
}

/// Fading-averaged leakage of a profile: tap gains have independent
/// uniform phases, so cross terms vanish in expectation and the off- and
/// on-diagonal energies add with the mean tap powers as weights.
inline double profile_leakage_ratio(const ChirpBasis& basis, std::size_t guard, const ChannelProfile& profile) {
    double diag = 0.0, off = 0.0;
    for (std::size_t m = 0; m < profile.taps(); ++m) {
        const LeakageReport r = channel_leakage(basis, guard, profile.delays[m]);
        diag += profile.powers[m] * r.diagonal_energy;
        off += profile.powers[m] * r.off_diagonal_energy;
    }
    return diag > 0.0 ? off / diag : 0.0;
}

}  // namespace mcdm
