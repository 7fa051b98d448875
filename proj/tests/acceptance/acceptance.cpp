// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. One PASS/FAIL line per criterion; exits non-zero if
// any criterion fails. Optional argument: path to the mcdm tool, used to
// check the printed rate table.
#include "mcdm/mcdm.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mcdm;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double max_abs_diff(const CVec& a, const CVec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

CVec random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    CVec v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

Bits random_bits(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed);
    Bits b(n);
    for (auto& x : b) x = rng.bit();
    return b;
}

// ---------------------------------------------------------------------------

Outcome orthogonality() {
    const SystemConfig cfg = preset_sim_2017();
    const ChirpBasis basis(cfg.waveform(System::Mcdm));
    const std::size_t K = basis.size();
    std::vector<CVec> psi(K);
    double sample_dev = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        psi[k] = basis.subcarrier(k);
        if (k % 61 == 0)
            for (std::size_t n = 0; n < K; ++n)
                sample_dev = std::max(sample_dev, std::abs(psi[k][n] - oracle::chirp_sample(k, n, K, cfg.spacing_hz,
                                                                                            cfg.chirp_rate)));
    }
    double off = 0.0, diag = 0.0;
    for (std::size_t m = 0; m < K; ++m) {
        for (std::size_t n = m; n < K; ++n) {
            double re = 0.0, im = 0.0;
            const CVec& a = psi[m];
            const CVec& b = psi[n];
            for (std::size_t i = 0; i < K; ++i) {
                re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
                im += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
            }
            const double mag = std::abs(cf64{re, im} - (m == n ? 1.0 : 0.0));
            (m == n ? diag : off) = std::max(m == n ? diag : off, mag);
        }
    }
    return {off < 1e-10 && diag < 1e-12 && sample_dev < 1e-9,
            fmt("K=%zu mu=%.3g: max|rho_mn|=%.2e (<1e-10), max|rho_mm-1|=%.2e (<1e-12), samples vs definition %.1e",
                K, cfg.chirp_rate, off, diag, sample_dev)};
}

Outcome transform_pair() {
    std::mt19937_64 rng(2);
    double round_trip = 0.0, factor = 0.0;
    for (std::size_t K : {64u, 1024u}) {
        const ChirpBasis b(WaveformParams(K, 488.0, 2.38e5));
        for (int i = 0; i < 100; ++i) {
            const Spectrum X{random_vector(K, rng)};
            round_trip = std::max(round_trip, max_abs_diff(oct_forward(b, ioct_inverse(b, X)).coeffs, X.coeffs));
        }
    }
    const ChirpBasis b64(WaveformParams(64, 488.0, 2.38e5));
    for (int i = 0; i < 100; ++i) {
        const CVec x = random_vector(64, rng);
        factor = std::max(factor, max_abs_diff(oct_forward(b64, x).coeffs, oracle::direct_oct(x, 488.0, 2.38e5)));
    }
    return {round_trip < 1e-9 && factor < 1e-9,
            fmt("OCT(IOCT(X)) max err %.2e at K in {64,1024}; dechirp+FFT vs direct sum %.2e at K=64 (both <1e-9)",
                round_trip, factor)};
}

Outcome bit_rates(const std::string& cli) {
    const auto rows = report_rates(preset_sim_2017());
    double r32 = 0.0, r8 = 0.0;
    for (const auto& r : rows) {
        if (r.scheme == Scheme::Qam32) r32 = r.bits_per_second;
        if (r.scheme == Scheme::Psk8) r8 = r.bits_per_second;
    }
    bool ok = std::abs(r32 - 1390625.0) < 1e-6 && std::abs(r8 - 834375.0) < 1e-6;
    std::string detail = fmt("32QAM %.6f bps, 8PSK %.6f bps", r32, r8);
    if (!cli.empty()) {
        std::string text;
        if (FILE* p = popen((cli + " rates sim-2017").c_str(), "r")) {
            char buf[256];
            while (std::fgets(buf, sizeof buf, p)) text += buf;
            ok = ok && pclose(p) == 0;
        } else {
            ok = false;
        }
        const bool printed = text.find("32QAM     1,390,625 bps") != std::string::npos &&
                             text.find("8PSK        834,375 bps") != std::string::npos;
        ok = ok && printed;
        detail += printed ? "; tool prints 1,390,625 and 834,375 bps" : "; tool output mismatch:\n" + text;
    }
    return {ok, detail};
}

SystemConfig awgn_config() {
    SystemConfig c = preset_sim_2017();
    c.channel = ChannelProfile::identity();
    c.receiver.csi = CsiMode::Ideal;
    c.receiver.cfo_correction = false;
    c.sweep.systems = {System::Mcdm};
    c.sweep.packets_per_point = 100000;
    c.sweep.min_bit_errors = 0;
    c.sweep.min_bits = 1000000;
    c.sweep.seed = 4;
    return c;
}

Outcome awgn_vs_theory() {
    std::string detail;
    bool ok = true;
    for (Scheme scheme : {Scheme::Bpsk, Scheme::Qpsk}) {
        SystemConfig c = awgn_config();
        c.sweep.schemes = {scheme};
        c.sweep.snr_db.clear();
        for (double e : {0.0, 4.0, 8.0}) c.sweep.snr_db.push_back(ebn0_to_snr(e, c, scheme));
        const auto recs = run_ber_sweep(c);
        for (std::size_t i = 0; i < recs.size(); ++i) {
            const double ebn0 = 4.0 * static_cast<double>(i);
            const double p = oracle::gaussian_tail(std::sqrt(2.0 * std::pow(10.0, ebn0 / 10.0)));
            const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(recs[i].bits_sent));
            const double z = (recs[i].ber - p) / sigma;
            const bool good = std::abs(z) <= 3.0 && recs[i].bits_sent >= 1000000;
            ok = ok && good;
            detail += fmt("\n      %s Eb/N0=%g dB: ber %.4e theory %.4e (z=%+.2f, %llu bits)%s",
                          std::string(scheme_name(scheme)).c_str(), ebn0, recs[i].ber, p, z,
                          static_cast<unsigned long long>(recs[i].bits_sent), good ? "" : "  <-- outside 3 sigma");
        }
    }
    return {ok, "MCDM, identity channel" + detail};
}

Outcome mcdm_ofdm_equivalence() {
    std::string detail;
    bool ok = true;
    for (Scheme scheme : {Scheme::Bpsk, Scheme::Qpsk}) {
        SystemConfig c = preset_sim_2017();
        c.channel = ChannelProfile::identity();
        c.sweep.systems = {System::Mcdm, System::Ofdm};
        c.sweep.schemes = {scheme};
        c.sweep.snr_db = {ebn0_to_snr(4.0, c, scheme)};
        c.sweep.packets_per_point = 100000;
        c.sweep.min_bit_errors = 0;
        c.sweep.min_bits = 1000000;
        c.sweep.seed = 5;
        const auto recs = run_ber_sweep(c);
        const BerRecord& m = recs[0];
        const BerRecord& o = recs[1];
        const double n1 = static_cast<double>(m.bits_sent), n2 = static_cast<double>(o.bits_sent);
        const double pooled = static_cast<double>(m.bit_errors + o.bit_errors) / (n1 + n2);
        const double z = (m.ber - o.ber) / std::sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2));
        const bool good = std::abs(z) < 2.5758 && m.bits_sent >= 1000000 && o.bits_sent >= 1000000;
        ok = ok && good;
        detail += fmt("\n      %s Eb/N0=4 dB, pilot CSI: MCDM %.4e vs OFDM %.4e over %llu bits each, z=%+.2f (|z|<2.576)",
                      std::string(scheme_name(scheme)).c_str(), m.ber, o.ber,
                      static_cast<unsigned long long>(m.bits_sent), z);
    }
    return {ok, "identity channel, same payload and noise streams" + detail};
}

Outcome detector_oracle() {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> g;
    std::size_t instances = 0, mismatches = 0;
    const FrameLayout one(4, 2, 0, {1.0, 1.0});
    for (Scheme s : {Scheme::Bpsk, Scheme::Qpsk, Scheme::Psk8}) {
        const Constellation c(s);
        for (std::size_t K = 1; K <= 4; ++K) {
            for (int inst = 0; inst < 100; ++inst, ++instances) {
                CVec y(K), h(K);
                for (std::size_t i = 0; i < K; ++i) {
                    y[i] = {g(rng), g(rng)};
                    h[i] = {g(rng), g(rng)};
                }
                const auto want = oracle::joint_ml(y, h, c.points());
                for (std::size_t i = 0; i < K; ++i) {
                    Spectrum yy{CVec(4)};
                    yy[1] = y[i];
                    ChannelEstimate e;
                    e.h_hat.assign(4, h[i]);
                    if (detect_symbols(yy, e, one, c).labels[0] != want[i]) {
                        ++mismatches;
                        break;
                    }
                }
            }
        }
    }
    return {mismatches == 0, fmt("%zu instances (BPSK/QPSK/8PSK, K=1..4, up to 4096 candidates), %zu mismatches",
                                 instances, mismatches)};
}

Outcome detector_complexity() {
    auto count = [](std::size_t K) {
        const FrameLayout l(K, 2, 0, {1.0, 1.0});
        ChannelEstimate e;
        e.h_hat.assign(K, 1.0);
        OpCounter ops;
        detect_symbols(Spectrum{CVec(K, 0.3)}, e, l, Constellation(Scheme::Qam16), &ops);
        return ops;
    };
    const OpCounter a = count(1024), b = count(2048);
    const double rm = static_cast<double>(b.multiplications) / static_cast<double>(a.multiplications);
    const double ra = static_cast<double>(b.additions) / static_cast<double>(a.additions);
    return {rm >= 1.9 && rm <= 2.1 && ra >= 1.9 && ra <= 2.1,
            fmt("16QAM: multiplies %llu -> %llu (x%.4f), additions %llu -> %llu (x%.4f)",
                static_cast<unsigned long long>(a.multiplications), static_cast<unsigned long long>(b.multiplications),
                rm, static_cast<unsigned long long>(a.additions), static_cast<unsigned long long>(b.additions), ra)};
}

Outcome receiver_exactness() {
    const SystemConfig cfg = preset_sim_2017();
    std::size_t errors = 0, runs = 0;
    double worst_cfo = 0.0;
    bool timing = true;
    for (System sys : {System::Mcdm, System::Ofdm}) {
        const ChirpBasis basis(cfg.waveform(sys));
        for (Scheme s : kAllSchemes) {
            const PacketSpec spec = cfg.packet_spec(s);
            const Bits bits = random_bits(spec.payload_bits(), 100 + static_cast<std::uint64_t>(s));
            const BasebandSignal tx = build_packet(bits, spec, basis, 1.0);
            const ChannelRealization flat{{std::polar(0.5, 1.0)}, {0}, 0.0, 60};
            const ChannelRealization shifted{{cf64{1.0, 0.0}}, {0}, 100.0, 137};
            for (const auto* r : {&flat, &shifted}) {
                BasebandSignal rx = apply_channel(tx, *r);
                rx.samples.resize(rx.size() + 64);
                const PacketReport rep = receive_packet(rx, spec, basis, cfg.receiver, std::span<const std::uint8_t>(bits));
                ++runs;
                errors += rep.detected ? rep.bit_errors : bits.size();
                timing = timing && rep.sync.t_hat == r->timing_offset;
                worst_cfo = std::max(worst_cfo, std::abs(rep.cfo.delta_f_hat - r->cfo_hz));
            }
        }
    }
    return {errors == 0 && timing && worst_cfo < 1e-3,
            fmt("%zu noiseless runs (5 schemes x MCDM/OFDM x {flat 0.5e^j1, 100 Hz + 137 samples}): %zu bit errors, "
                "timing %s, max |cfo error| %.2e Hz (<1e-3)",
                runs, errors, timing ? "exact" : "WRONG", worst_cfo)};
}

Outcome channel_estimation() {
    const SystemConfig cfg = preset_sim_2017();
    const ChirpBasis ofdm(cfg.waveform(System::Ofdm));
    const PacketSpec spec = cfg.packet_spec(Scheme::Qpsk);
    const std::size_t N = ofdm.size();
    double worst = 0.0;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        RngStream rng = RngStream::derive(9, {trial});
        const ChannelRealization r = draw_realization(cfg.channel, rng, 0.0, 0.0, cfg.timing_offset);
        const Bits bits = random_bits(spec.payload_bits(), trial);
        BasebandSignal rx = apply_channel(build_packet(bits, spec, ofdm, 1.0), r);
        rx.samples.resize(rx.size() + 64);
        const PacketReport rep = receive_packet(rx, spec, ofdm, cfg.receiver);
        if (!rep.detected) return {false, "packet not detected"};
        // True response: DFT of the impulse response, delays measured from
        // the synced start.
        oracle::CVec impulse(N);
        for (std::size_t m = 0; m < r.taps.size(); ++m) {
            const long e = static_cast<long>(r.delays[m] + r.timing_offset) - static_cast<long>(rep.sync.t_hat);
            impulse[static_cast<std::size_t>((e % static_cast<long>(N) + static_cast<long>(N)) % static_cast<long>(N))] +=
                r.taps[m];
        }
        oracle::CVec H = oracle::unitary_dft(impulse);
        for (auto& v : H) v *= std::sqrt(static_cast<double>(N));
        for (const ChannelEstimate& est : rep.channel) {
            double num = 0.0, den = 0.0;
            for (std::size_t k : spec.layout.data_indices()) {
                num += std::norm(est.h_hat[k] - H[k]);
                den += std::norm(H[k]);
            }
            worst = std::max(worst, std::sqrt(num / den));
        }
    }
    return {worst < 0.02, fmt("OFDM, 20 noiseless draws of the 3-tap profile (delays 0/4/9): worst relative RMS "
                              "error over data subcarriers %.3f%% (<2%%)",
                              100.0 * worst)};
}

Outcome ber_curves() {
    SystemConfig c = preset_sim_2017();
    c.sweep.threads = 0;
    std::vector<BerRecord> recs = run_ber_sweep(c);
    write_results(recs, "acceptance_sweep.csv", ResultFormat::Csv);

    bool ok = recs.size() == 2 * 5 * 13;
    std::string detail = fmt("%zu cells (MCDM/OFDM x 5 schemes x SNR 0:2:24 dB), written to acceptance_sweep.csv",
                             recs.size());
    std::size_t non_monotone = 0;
    detail += "\n      SNR dB :";
    for (double s : c.sweep.snr_db) detail += fmt(" %8g", s);
    for (std::size_t i = 0; i + 13 <= recs.size(); i += 13) {
        std::vector<BerRecord> curve(recs.begin() + static_cast<long>(i), recs.begin() + static_cast<long>(i + 13));
        const bool mono = ber_monotone(curve);
        non_monotone += !mono;
        detail += fmt("\n      %s %-5s", std::string(system_name(curve[0].system)).c_str(),
                      std::string(scheme_name(curve[0].scheme)).c_str());
        for (const auto& r : curve) detail += fmt(" %8.2e", r.ber);
        if (!mono) detail += "  <-- not monotone";
    }
    ok = ok && non_monotone == 0;

    // Reproducibility: rerun two curves with a different thread count.
    SystemConfig again = c;
    again.sweep.schemes = {Scheme::Bpsk, Scheme::Qam32};
    again.sweep.threads = 3;
    const auto rerun = run_ber_sweep(again);
    bool same = true;
    for (const auto& r : rerun) {
        const auto it = std::find_if(recs.begin(), recs.end(), [&](const BerRecord& x) {
            return x.system == r.system && x.scheme == r.scheme && x.snr_db == r.snr_db;
        });
        same = same && it != recs.end() && to_csv_row(*it) == to_csv_row(r);
    }
    ok = ok && same;
    detail += fmt("\n      monotone curves: %zu/10; rerun with other thread count identical: %s",
                  10 - non_monotone, same ? "yes" : "NO");

    // Leakage of the diagonal channel model.
    const ChirpBasis basis(c.waveform(System::Mcdm));
    const std::size_t guard = c.guard_samples();
    bool profile_ok = true;
    detail += "\n      leakage (off-/on-diagonal energy), single path:";
    for (std::size_t d : {1u, 4u, 9u, 16u, 32u, 64u, 128u, 255u}) {
        const LeakageReport lr = channel_leakage(basis, guard, d);
        const bool in_profile = std::find(c.channel.delays.begin(), c.channel.delays.end(), d) != c.channel.delays.end();
        if (in_profile) profile_ok = profile_ok && lr.ratio_db() < -30.0;
        detail += fmt("\n        delay %3zu: %7.2f dB%s", d, lr.ratio_db(),
                      in_profile ? "  (profile tap)" : (lr.ratio_db() < -30.0 ? "" : "  (above -30 dB)"));
    }
    const double prof = 10.0 * std::log10(profile_leakage_ratio(basis, guard, c.channel));
    detail += fmt("\n      profile average %.2f dB; taps of the simulated profile below -30 dB: %s", prof,
                  profile_ok ? "yes" : "NO");
    ok = ok && profile_ok;
    return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 orthogonality", orthogonality},
        {"2 transform pair", transform_pair},
        {"3 bit rates", [&] { return bit_rates(cli); }},
        {"4 AWGN BER vs theory", awgn_vs_theory},
        {"5 MCDM/OFDM AWGN equivalence", mcdm_ofdm_equivalence},
        {"6 detector oracle", detector_oracle},
        {"7 detector complexity", detector_complexity},
        {"8 receiver exactness", receiver_exactness},
        {"9 channel estimation", channel_estimation},
        {"10 BER curves and leakage", ber_curves},
    };
    std::size_t failed = 0;
    for (const auto& [name, run] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  criterion %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
