// SPDX-License-Identifier: Apache-2.0
//
// mcdm: command-line front end for the modem library.
//
//   mcdm sweep <config> -o results.csv
//   mcdm tx <config> payload.bin -o packet.iq
//   mcdm rx <config> packet.iq [--ref payload.bin]
//   mcdm basis <config>
//   mcdm rates <config>
//
// <config> is a preset name (sim-2017, exp-2017) or a config file path.
#include "mcdm/mcdm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace mcdm;

namespace {

SystemConfig load_checked(const std::string& name) {
    SystemConfig c = load_config(name);
    for (const auto& w : c.validate()) std::cerr << "mcdm: warning: " << w << '\n';
    return c;
}

std::string with_commas(double value) {
    std::string digits = std::to_string(static_cast<long long>(std::llround(value)));
    std::string out;
    const std::size_t lead = digits.size() % 3;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i != 0 && (i - lead) % 3 == 0) out.push_back(',');
        out.push_back(digits[i]);
    }
    return out;
}

std::string format_snr(double snr) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", snr);
    return buf;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string config;
    std::string output;
    std::string format = "csv";
    std::string diag;
    std::optional<std::size_t> threads;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

int cmd_sweep(const SweepArgs& a) {
    SystemConfig c = load_checked(a.config);
    if (a.threads) c.sweep.threads = *a.threads;
    if (a.seed) c.sweep.seed = *a.seed;
    const ResultFormat fmt = a.format == "jsonl" ? ResultFormat::Jsonl : ResultFormat::Csv;

    // Start a fresh file, then append each cell as it finishes.
    write_results({}, a.output, fmt);
    std::ofstream diag;
    if (!a.diag.empty()) {
        diag.open(a.diag, std::ios::trunc);
        if (!diag) throw std::runtime_error("cannot open '" + a.diag + "'");
    }

    SweepCallbacks cb;
    cb.on_record = [&](const BerRecord& r) {
        write_results({r}, a.output, fmt, true);
        if (!a.quiet)
            std::cerr << system_name(r.system) << ' ' << scheme_name(r.scheme) << " snr=" << format_snr(r.snr_db)
                      << " dB  ber=" << r.ber << "  (" << r.bit_errors << '/' << r.bits_sent << " bits, "
                      << r.packets << " packets, " << r.wall_time_s << " s)\n";
    };
    if (diag.is_open()) {
        cb.on_packet = [&](const BerRecord& cell, const TrialOutcome& o) {
            nlohmann::json j;
            j["system"] = system_name(cell.system);
            j["scheme"] = scheme_name(cell.scheme);
            j["snr_db"] = detail::snr_to_json(cell.snr_db);
            j["trial"] = o.trial;
            j["detected"] = o.report.detected;
            j["t_hat"] = o.report.sync.t_hat;
            j["peak_metric"] = o.report.sync.peak_metric;
            j["cfo_hz"] = o.report.cfo.delta_f_hat;
            j["bit_errors"] = o.bit_errors;
            j["symbol_bit_errors"] = o.report.symbol_bit_errors;
            diag << j.dump() << '\n';
        };
    }
    run_ber_sweep(c, cb);
    return 0;
}

// ---------------------------------------------------------------------------

struct TxArgs {
    std::string config;
    std::string payload;
    std::string output;
    std::optional<std::string> scheme;
    std::optional<std::string> system;
    bool channel = false;
    std::optional<double> snr_db;
    std::uint64_t seed = 1;
    std::optional<double> center_freq;
};

int cmd_tx(const TxArgs& a) {
    SystemConfig c = load_checked(a.config);
    if (a.scheme) c.scheme = parse_scheme(*a.scheme);
    if (a.system) c.system = parse_system(*a.system);
    const ChirpBasis basis(c.waveform(c.system));
    const PacketSpec spec = c.packet_spec(c.scheme);

    Bits bits = bytes_to_bits(read_bytes(a.payload));
    if (bits.empty()) throw std::runtime_error("payload file '" + a.payload + "' is empty");
    const std::size_t per_packet = spec.payload_bits();
    const std::size_t packets = (bits.size() + per_packet - 1) / per_packet;
    bits.resize(packets * per_packet, 0);

    BasebandSignal burst;
    burst.sample_rate = basis.params().sample_rate();
    double tx_energy = 0.0;
    std::size_t tx_samples = 0;
    for (std::size_t p = 0; p < packets; ++p) {
        const BasebandSignal pkt =
            build_packet(std::span<const std::uint8_t>(bits).subspan(p * per_packet, per_packet), spec, basis,
                         c.amplitude);
        for (Span s : pkt.active) {
            for (std::size_t n = s.begin; n < s.end; ++n) tx_energy += std::norm(pkt.samples[n]);
            tx_samples += s.length();
        }
        ChannelRealization real{{cf64{1.0, 0.0}}, {0}, 0.0, c.timing_offset};
        if (a.channel) {
            RngStream rng = RngStream::derive(a.seed, {stream_key::kChannel, p});
            real = draw_realization(c.channel, rng, a.snr_db.value_or(INFINITY), c.cfo_hz, c.timing_offset);
        }
        const BasebandSignal out = apply_channel(pkt, real);
        const std::size_t base = burst.size();
        burst.samples.insert(burst.samples.end(), out.samples.begin(), out.samples.end());
        for (Span s : out.active) burst.active.push_back(Span{s.begin + base, s.end + base});
    }
    burst.samples.resize(burst.size() + 64);

    if (a.snr_db) {
        if (tx_samples == 0 || tx_energy == 0.0) throw std::runtime_error("cannot add noise to a silent signal");
        const double mean_gain = a.channel ? std::accumulate(c.channel.powers.begin(), c.channel.powers.end(), 0.0) : 1.0;
        RngStream rng = RngStream::derive(a.seed, {stream_key::kNoise});
        add_noise(burst, noise_variance(tx_energy / static_cast<double>(tx_samples) * mean_gain, *a.snr_db), rng);
    }

    write_iq(a.output, burst, a.center_freq);
    std::cout << "wrote " << packets << " packet" << (packets == 1 ? "" : "s") << ", " << burst.size()
              << " samples at " << burst.sample_rate << " Hz to " << a.output << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct RxArgs {
    std::string config;
    std::string input;
    std::optional<std::string> reference;
    std::optional<std::string> output;
    std::optional<std::string> json;
    std::optional<std::string> scheme;
    std::optional<std::string> system;
    bool dump_channel = false;
};

int cmd_rx(const RxArgs& a) {
    SystemConfig c = load_checked(a.config);
    if (a.scheme) c.scheme = parse_scheme(*a.scheme);
    if (a.system) c.system = parse_system(*a.system);
    if (c.receiver.csi == CsiMode::Ideal)
        throw std::runtime_error("receiver.csi = ideal needs the true channel; the rx tool only supports pilot CSI");
    const ChirpBasis basis(c.waveform(c.system));
    const PacketSpec spec = c.packet_spec(c.scheme);

    const BasebandSignal rx = read_iq(a.input, c.sample_rate());
    if (std::abs(rx.sample_rate - c.sample_rate()) > 1e-6 * c.sample_rate())
        throw std::runtime_error("capture sample rate " + std::to_string(rx.sample_rate) +
                                 " Hz does not match the configured " + std::to_string(c.sample_rate()) + " Hz");

    std::ofstream json;
    if (a.json) {
        json.open(*a.json, std::ios::trunc);
        if (!json) throw std::runtime_error("cannot open '" + *a.json + "'");
    }

    Bits decoded;
    std::size_t cursor = 0, packets = 0;
    while (cursor + spec.training_length() <= rx.size()) {
        BasebandSignal rest;
        rest.sample_rate = rx.sample_rate;
        rest.samples.assign(rx.samples.begin() + static_cast<long>(cursor), rx.samples.end());
        const PacketReport rep = receive_packet(rest, spec, basis, c.receiver);
        if (!rep.detected) break;
        ++packets;
        std::cout << "packet " << packets << ": start " << cursor + rep.sync.t_hat << ", peak "
                  << rep.sync.peak_metric << ", cfo " << rep.cfo.delta_f_hat << " Hz\n";
        if (json.is_open()) {
            nlohmann::json j;
            j["packet"] = packets - 1;
            j["t_hat"] = cursor + rep.sync.t_hat;
            j["peak_metric"] = rep.sync.peak_metric;
            j["cfo_hz"] = rep.cfo.delta_f_hat;
            if (a.dump_channel) {
                nlohmann::json h = nlohmann::json::array();
                for (const auto& est : rep.channel) {
                    nlohmann::json sym = nlohmann::json::array();
                    for (cf64 v : est.h_hat) sym.push_back({v.real(), v.imag()});
                    h.push_back(sym);
                }
                j["h_hat"] = h;
            }
            json << j.dump() << '\n';
        }
        decoded.insert(decoded.end(), rep.bits.begin(), rep.bits.end());
        cursor += rep.sync.t_hat + spec.length();
    }

    if (packets == 0) {
        std::cerr << "mcdm: no packet detected in " << a.input << '\n';
        return 3;
    }
    std::cout << packets << " packet" << (packets == 1 ? "" : "s") << ", " << decoded.size() << " bits\n";

    if (a.output) write_bytes(*a.output, bits_to_bytes(decoded));
    if (a.reference) {
        const Bits ref = bytes_to_bits(read_bytes(*a.reference));
        const std::size_t common = std::min(ref.size(), decoded.size());
        std::size_t errors = count_bit_errors(std::span(decoded).first(common), std::span(ref).first(common));
        errors += ref.size() - common;  // bits in packets that never arrived
        std::cout << "bit errors: " << errors << " / " << ref.size() << "  ber "
                  << (ref.empty() ? 0.0 : static_cast<double>(errors) / static_cast<double>(ref.size())) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_basis(const std::string& config_name) {
    const SystemConfig c = load_checked(config_name);
    const WaveformParams p = c.waveform(System::Mcdm);
    std::cout << "subcarriers      " << p.subcarriers() << "\n"
              << "spacing          " << p.spacing_hz() << " Hz\n"
              << "chirp rate       " << p.chirp_rate() << " Hz/s\n"
              << "symbol duration  " << p.symbol_duration() * 1e3 << " ms\n"
              << "sample rate      " << p.sample_rate() << " Hz\n"
              << "chirp span       " << p.chirp_span_hz() << " Hz\n"
              << "guard            " << c.guard_samples() << " samples\n\n";

    const ChirpBasis mcdm(p);
    const ChirpBasis ofdm(p.without_chirp());
    for (const auto* b : {&mcdm, &ofdm}) {
        const auto r = orthogonality_report(*b);
        std::cout << (b == &mcdm ? "MCDM" : "OFDM") << " Gram matrix: max |off-diagonal| " << r.max_off_diagonal
                  << ", max |diagonal - 1| " << r.max_diagonal_error << '\n';
    }

    std::vector<std::size_t> delays = c.channel.delays;
    for (std::size_t d : {1u, 4u, 16u, 64u})
        if (std::find(delays.begin(), delays.end(), d) == delays.end()) delays.push_back(d);
    std::sort(delays.begin(), delays.end());
    std::printf("\nleakage of a single delayed path (off-diagonal / diagonal energy)\n");
    std::printf("%8s %14s %14s %18s\n", "delay", "MCDM dB", "OFDM dB", "MCDM worst bin dB");
    for (std::size_t d : delays) {
        if (d > c.guard_samples()) continue;
        const auto m = channel_leakage(mcdm, c.guard_samples(), d);
        const auto o = channel_leakage(ofdm, c.guard_samples(), d);
        std::printf("%8zu %14.2f %14.2f %18.2f\n", d, m.ratio_db(), o.ratio_db(), m.worst_subcarrier_db());
    }
    const double prof = profile_leakage_ratio(mcdm, c.guard_samples(), c.channel);
    std::printf("\nchannel profile, fading-averaged MCDM leakage: %.2f dB\n",
                10.0 * std::log10(std::max(prof, 1e-300)));
    return 0;
}

int cmd_rates(const std::string& config_name) {
    const SystemConfig c = load_checked(config_name);
    std::printf("payload rate, %zu data subcarriers, %.3g ms symbol + %.3g ms guard\n",
                c.subcarriers - c.pilots - c.nulls, c.nominal_symbol_duration() * 1e3, c.guard_s * 1e3);
    for (const RateRow& r : report_rates(c))
        std::printf("%-6s %12s bps\n", std::string(scheme_name(r.scheme)).c_str(),
                    with_commas(r.bits_per_second).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chirp-division multiplexing modem: BER sweeps, packet tx/rx, basis diagnostics"};
    app.require_subcommand(1);

    SweepArgs sweep;
    auto* s = app.add_subcommand("sweep", "Monte-Carlo BER sweep over the configured grid");
    s->add_option("config", sweep.config, "Preset name or config file")->required();
    s->add_option("-o,--output", sweep.output, "Results file")->required();
    s->add_option("--format", sweep.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    s->add_option("--diag", sweep.diag, "Per-packet diagnostics (JSON lines)");
    s->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)");
    s->add_option("--seed", sweep.seed, "Override the master seed");
    s->add_flag("-q,--quiet", sweep.quiet, "No progress on stderr");

    TxArgs tx;
    auto* t = app.add_subcommand("tx", "Modulate a payload file into a float32 I/Q capture");
    t->add_option("config", tx.config, "Preset name or config file")->required();
    t->add_option("payload", tx.payload, "Payload bytes")->required()->check(CLI::ExistingFile);
    t->add_option("-o,--output", tx.output, "I/Q output file")->required();
    t->add_option("--scheme", tx.scheme, "Override modem.scheme");
    t->add_option("--system", tx.system, "Override modem.system (mcdm or ofdm)");
    t->add_flag("--channel", tx.channel, "Pass each packet through the configured channel");
    t->add_option("--snr", tx.snr_db, "Add white noise at this SNR (dB)");
    t->add_option("--seed", tx.seed, "Seed for channel draws and noise");
    t->add_option("--center-freq", tx.center_freq, "Center frequency recorded in the metadata (Hz)");

    RxArgs rx;
    auto* r = app.add_subcommand("rx", "Demodulate packets from a float32 I/Q capture");
    r->add_option("config", rx.config, "Preset name or config file")->required();
    r->add_option("iq", rx.input, "I/Q capture")->required()->check(CLI::ExistingFile);
    r->add_option("--ref", rx.reference, "Transmitted payload, for bit error counts")->check(CLI::ExistingFile);
    r->add_option("-o,--output", rx.output, "Write the decoded payload bytes here");
    r->add_option("--json", rx.json, "Per-packet diagnostics (JSON lines)");
    r->add_flag("--dump-channel", rx.dump_channel, "Include channel estimates in the diagnostics");
    r->add_option("--scheme", rx.scheme, "Override modem.scheme");
    r->add_option("--system", rx.system, "Override modem.system (mcdm or ofdm)");

    std::string basis_config;
    auto* b = app.add_subcommand("basis", "Orthogonality and delay leakage of the configured basis");
    b->add_option("config", basis_config, "Preset name or config file")->required();

    std::string rates_config;
    auto* rt = app.add_subcommand("rates", "Payload bit rate per modulation scheme");
    rt->add_option("config", rates_config, "Preset name or config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*s) return cmd_sweep(sweep);
        if (*t) return cmd_tx(tx);
        if (*r) return cmd_rx(rx);
        if (*b) return cmd_basis(basis_config);
        if (*rt) return cmd_rates(rates_config);
    } catch (const std::exception& e) {
        std::cerr << "mcdm: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
