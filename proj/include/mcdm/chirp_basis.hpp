// SPDX-License-Identifier: Apache-2.0
//
// Orthogonal linear-chirp subcarrier basis and the discrete orthogonal chirp
// transform pair.
//
// Subcarrier k, sampled at t_n = n / f_s with f_s = K * delta_f:
//
//     psi_k[n] = (1/sqrt(N)) exp(j (2 pi k delta_f t_n + pi mu t_n^2))
//
// The transform factors as a quadratic-phase multiply (dechirp) followed by
// an N-point DFT, so both directions cost O(N log N). With mu = 0 it is the
// unitary DFT and the modem degenerates to OFDM.
#pragma once

#include "mcdm/fft.hpp"
#include "mcdm/types.hpp"

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace mcdm {

/// Waveform parameters at critical sampling. The symbol duration is tied
/// to the spacing (T = 1 / delta_f) and the sample rate to the occupied
/// bandwidth (f_s = K delta_f), so N = K samples per symbol body.
class WaveformParams {
public:
    WaveformParams(std::size_t subcarriers, double spacing_hz, double chirp_rate_hz_per_s)
        : subcarriers_(subcarriers), spacing_hz_(spacing_hz), chirp_rate_(chirp_rate_hz_per_s) {
        if (subcarriers < 2) throw std::invalid_argument("WaveformParams: need at least 2 subcarriers");
        if (!(spacing_hz > 0.0) || !std::isfinite(spacing_hz))
            throw std::invalid_argument("WaveformParams: subcarrier spacing must be positive");
        if (!std::isfinite(chirp_rate_hz_per_s))
            throw std::invalid_argument("WaveformParams: chirp rate must be finite");
    }

    std::size_t subcarriers() const { return subcarriers_; }
    std::size_t samples_per_symbol() const { return subcarriers_; }
    double spacing_hz() const { return spacing_hz_; }
    double chirp_rate() const { return chirp_rate_; }
    double symbol_duration() const { return 1.0 / spacing_hz_; }
    double sample_rate() const { return static_cast<double>(subcarriers_) * spacing_hz_; }
    /// Frequency span swept by one chirp, mu * T.
    double chirp_span_hz() const { return chirp_rate_ * symbol_duration(); }

    /// Same grid with mu = 0 (the OFDM special case).
    WaveformParams without_chirp() const { return {subcarriers_, spacing_hz_, 0.0}; }

    bool operator==(const WaveformParams&) const = default;

private:
    std::size_t subcarriers_;
    double spacing_hz_;
    double chirp_rate_;
};

/// Frequency-domain symbol values at the K bin centers.
struct Spectrum {
    CVec coeffs;

    std::size_t size() const { return coeffs.size(); }
    cf64& operator[](std::size_t k) { return coeffs[k]; }
    const cf64& operator[](std::size_t k) const { return coeffs[k]; }
};

/// Precomputed sampled basis for one parameter set. Immutable; share it
/// freely across threads.
class ChirpBasis {
public:
    explicit ChirpBasis(const WaveformParams& params)
        : params_(params),
          fft_(std::make_shared<const detail::Fft>(params.samples_per_symbol())),
          dechirp_(params.samples_per_symbol()) {
        for (std::size_t n = 0; n < dechirp_.size(); ++n) dechirp_[n] = dechirp_at(static_cast<long>(n));
    }

    const WaveformParams& params() const { return params_; }
    std::size_t size() const { return dechirp_.size(); }

    /// exp(-j pi mu t_n^2) / sqrt(N) for n in [0, N).
    const CVec& dechirp() const { return dechirp_; }

    /// The dechirp factor evaluated at any integer sample index, including
    /// indices before 0 and past the symbol body. The quadratic phase keeps
    /// its t = 0 reference at the symbol start.
    cf64 dechirp_at(long n) const {
        const double t = static_cast<double>(n) / params_.sample_rate();
        const double phase = -kPi * params_.chirp_rate() * t * t;
        return std::polar(1.0 / std::sqrt(static_cast<double>(size())), phase);
    }

    /// Sampled subcarrier psi_k.
    CVec subcarrier(std::size_t k) const {
        const std::size_t n_total = size();
        if (k >= n_total) throw std::out_of_range("ChirpBasis::subcarrier: index out of range");
        CVec out(n_total);
        for (std::size_t n = 0; n < n_total; ++n) {
            // Reduce k*n modulo N before scaling so the tone phase stays exact.
            const double tone = 2.0 * kPi * static_cast<double>((k * n) % n_total) / static_cast<double>(n_total);
            out[n] = std::conj(dechirp_[n]) * std::polar(1.0, tone);
        }
        return out;
    }

    const detail::Fft& fft() const { return *fft_; }

private:
    WaveformParams params_;
    std::shared_ptr<const detail::Fft> fft_;
    CVec dechirp_;
};

inline ChirpBasis make_basis(const WaveformParams& params) { return ChirpBasis(params); }

/// Discrete inner product sum_n psi_m[n] conj(psi_n[n]).
inline cf64 cross_correlation(const ChirpBasis& basis, std::size_t m, std::size_t n) {
    if (m >= basis.size() || n >= basis.size())
        throw std::out_of_range("cross_correlation: subcarrier index out of range");
    const CVec a = basis.subcarrier(m);
    const CVec b = basis.subcarrier(n);
    cf64 acc{};
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
    return acc;
}

/// OCT: coeffs[k] = <x, psi_k>, computed as DFT(x * dechirp).
inline Spectrum oct_forward(const ChirpBasis& basis, std::span<const cf64> time_samples) {
    if (time_samples.size() != basis.size())
        throw std::invalid_argument("oct_forward: expected " + std::to_string(basis.size()) + " samples, got " +
                                    std::to_string(time_samples.size()));
    Spectrum out{CVec(basis.size())};
    const CVec& d = basis.dechirp();
    for (std::size_t n = 0; n < d.size(); ++n) out.coeffs[n] = time_samples[n] * d[n];
    basis.fft().forward(out.coeffs, out.coeffs);
    return out;
}

/// IOCT: x[n] = sum_k coeffs[k] psi_k[n].
inline CVec ioct_inverse(const ChirpBasis& basis, const Spectrum& spectrum) {
    if (spectrum.size() != basis.size())
        throw std::invalid_argument("ioct_inverse: expected " + std::to_string(basis.size()) + " coefficients, got " +
                                    std::to_string(spectrum.size()));
    CVec out(basis.size());
    basis.fft().backward(spectrum.coeffs, out);
    const CVec& d = basis.dechirp();
    for (std::size_t n = 0; n < d.size(); ++n) out[n] *= std::conj(d[n]);
    return out;
}

}  // namespace mcdm
