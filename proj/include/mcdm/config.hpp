// SPDX-License-Identifier: Apache-2.0
//
// System configuration and its text format.
//
// The format is flat "key = value" lines. Keys use dotted groups, lists
// are comma separated, '#' starts a comment. An SNR list may also be given
// as a range "start:step:stop". A `preset = <name>` line loads a built-in
// preset first; the remaining keys override it, wherever they appear.
// Unknown keys are errors. See configs/*.conf and the README for the key
// reference.
#pragma once

#include "mcdm/channel.hpp"
#include "mcdm/chirp_basis.hpp"
#include "mcdm/constellation.hpp"
#include "mcdm/frame.hpp"
#include "mcdm/receiver.hpp"
#include "mcdm/transmitter.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcdm {

/// Which waveform family a run uses. OFDM is the same pipeline with mu = 0.
enum class System { Mcdm, Ofdm };

inline std::string_view system_name(System s) { return s == System::Mcdm ? "MCDM" : "OFDM"; }

inline System parse_system(std::string_view text) {
    std::string s;
    for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "mcdm") return System::Mcdm;
    if (s == "ofdm") return System::Ofdm;
    throw std::invalid_argument("unknown system '" + std::string(text) + "' (expected mcdm or ofdm)");
}

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SweepSettings {
    std::vector<System> systems{System::Mcdm, System::Ofdm};
    std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
    std::vector<double> snr_db{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22, 24};
    std::size_t packets_per_point = 200;  ///< hard cap per cell
    std::size_t min_bit_errors = 100;
    std::size_t min_bits = 100000;
    std::uint64_t seed = 2017;
    std::size_t threads = 0;  ///< 0 = hardware concurrency
};

struct SystemConfig {
    std::string name = "custom";

    // waveform
    std::size_t subcarriers = 1024;
    double spacing_hz = 488.0;
    double chirp_rate = 2.38e5;
    /// Nominal symbol duration for the rate table; 0 means 1 / spacing.
    double symbol_duration_s = 0.0;

    // frame
    std::size_t pilots = 256;
    std::size_t nulls = 56;
    std::uint64_t pilot_seed = 0x2C5;

    // packet
    double pn_duration_s = 0.26e-3;  ///< both training halves together
    double pause_s = 0.51e-3;
    double guard_s = 0.51e-3;
    std::size_t symbols = 4;
    std::uint64_t pn_seed = 0x155;
    double amplitude = 1.0;

    // channel
    ChannelProfile channel = ChannelProfile::default_multipath();
    double cfo_hz = 0.0;
    std::size_t timing_offset = 100;

    ReceiverConfig receiver{};

    // single-link modem settings (tx / rx commands)
    Scheme scheme = Scheme::Qpsk;
    System system = System::Mcdm;

    SweepSettings sweep{};

    WaveformParams waveform(System s) const {
        WaveformParams p(subcarriers, spacing_hz, chirp_rate);
        return s == System::Ofdm ? p.without_chirp() : p;
    }
    double sample_rate() const { return static_cast<double>(subcarriers) * spacing_hz; }
    double nominal_symbol_duration() const { return symbol_duration_s > 0.0 ? symbol_duration_s : 1.0 / spacing_hz; }

    std::size_t pn_half_samples() const {
        return static_cast<std::size_t>(std::llround(pn_duration_s * sample_rate() / 2.0));
    }
    std::size_t pause_samples() const { return duration_to_samples(pause_s, sample_rate()); }
    std::size_t guard_samples() const { return duration_to_samples(guard_s, sample_rate()); }

    FrameLayout layout() const { return FrameLayout::comb(subcarriers, pilots, nulls, pilot_seed); }

    PacketSpec packet_spec(Scheme s) const {
        return PacketSpec{.pn_half = pn_half_samples(),
                          .pause = pause_samples(),
                          .guard = guard_samples(),
                          .symbols = symbols,
                          .pn_seed = pn_seed,
                          .layout = layout(),
                          .constellation = Constellation(s)};
    }

    /// Throws ConfigError on anything that cannot run. Returns warnings for
    /// settings that run but break a modeling assumption.
    std::vector<std::string> validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError(msg); };
        if (subcarriers < 2) fail("waveform.subcarriers must be at least 2");
        if (!(spacing_hz > 0.0)) fail("waveform.spacing_hz must be positive");
        if (!std::isfinite(chirp_rate)) fail("waveform.chirp_rate_hz_per_s must be finite");
        if (symbol_duration_s < 0.0) fail("waveform.symbol_duration_s must be non-negative");
        if (pilots < 2) fail("frame.pilots must be at least 2 (interpolation needs two pilots)");
        if (subcarriers % pilots != 0) fail("frame.pilots must divide waveform.subcarriers");
        if (nulls > subcarriers - pilots) fail("frame.nulls exceeds the non-pilot subcarriers");
        if (subcarriers - pilots - nulls == 0) fail("layout leaves no data subcarriers");
        if (pn_half_samples() == 0) fail("packet.pn_duration_s is shorter than two samples");
        if (symbols == 0) fail("packet.symbols must be at least 1");
        if ((pilot_seed & 0x3FF) == 0) fail("frame.pilot_seed must have a non-zero low 10 bits");
        if ((pn_seed & 0x3FF) == 0) fail("packet.pn_seed must have a non-zero low 10 bits");
        if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) fail("packet.amplitude must be non-negative");
        if (!(receiver.sync_threshold >= 0.0 && receiver.sync_threshold <= 1.0))
            fail("receiver.sync_threshold must lie in [0, 1]");
        if (receiver.sync_window == 0) fail("receiver.sync_window must be positive");
        if (receiver.timing_backoff > guard_samples()) fail("receiver.timing_backoff exceeds the guard");
        if (2 * receiver.cfo_trim >= pn_half_samples())
            fail("receiver.cfo_trim leaves no training samples for the carrier offset estimate");
        if (receiver.timing_backoff > pause_samples()) fail("receiver.timing_backoff exceeds the pause");
        try {
            channel.validate();
        } catch (const std::invalid_argument& e) {
            fail(std::string("channel: ") + e.what());
        }
        if (sweep.systems.empty() || sweep.schemes.empty() || sweep.snr_db.empty()) fail("sweep grids must be non-empty");
        if (sweep.packets_per_point == 0) fail("sweep.packets_per_point must be at least 1");

        std::vector<std::string> warnings;
        if (channel.max_delay() + receiver.timing_backoff > guard_samples())
            warnings.push_back("channel delay spread plus timing backoff exceeds the guard interval");
        const double t_pn = 2.0 * static_cast<double>(pn_half_samples()) / sample_rate();
        if (std::abs(cfo_hz) >= 1.0 / t_pn) warnings.push_back("channel.cfo_hz is outside the estimator's range");
        return warnings;
    }
};

// ---------------------------------------------------------------------------
// Presets

/// Simulation study parameters: K = 1024 (256 pilots, 56 nulls, 712 data),
/// 488 Hz spacing, mu = 2.38e5 Hz/s, 2.05 ms symbols, 0.26 ms training,
/// 0.51 ms pause and guard.
inline SystemConfig preset_sim_2017() {
    SystemConfig c;
    c.name = "sim-2017";
    c.symbol_duration_s = 2.05e-3;
    return c;
}

/// Indoor testbed parameters: as the simulation preset but 1.02 ms
/// training and mu = 2.44e5 Hz/s. The testbed's 1 MHz hardware rate is an
/// oversampled front end; the modem runs at the critical rate K * delta_f.
inline SystemConfig preset_exp_2017() {
    SystemConfig c = preset_sim_2017();
    c.name = "exp-2017";
    c.pn_duration_s = 1.02e-3;
    c.chirp_rate = 2.44e5;
    return c;
}

inline const std::map<std::string, std::function<SystemConfig()>>& presets() {
    static const std::map<std::string, std::function<SystemConfig()>> table = {
        {"sim-2017", preset_sim_2017},
        {"exp-2017", preset_exp_2017},
    };
    return table;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = s.find(sep, start);
        out.push_back(trim(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start)));
        if (at == std::string_view::npos) break;
        start = at + 1;
    }
    if (out.size() == 1 && out[0].empty()) out.clear();
    return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
    std::string lower;
    for (char c : v) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "inf" || lower == "+inf") return std::numeric_limits<double>::infinity();
    if (lower == "-inf") return -std::numeric_limits<double>::infinity();
    double out = 0.0;
    const char* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end) throw ConfigError(key + ": '" + v + "' is not a number");
    return out;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    int base = 10;
    std::string_view digits = v;
    if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
        base = 16;
        digits.remove_prefix(2);
    }
    const char* end = digits.data() + digits.size();
    auto [ptr, ec] = std::from_chars(digits.data(), end, out, base);
    if (ec != std::errc{} || ptr != end || digits.empty())
        throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    std::string s;
    for (char c : v) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
    if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    throw ConfigError(key + ": '" + v + "' is not a boolean");
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    if (v.find(':') != std::string::npos) {
        const auto parts = split(v, ':');
        if (parts.size() != 3) throw ConfigError(key + ": range must be start:step:stop");
        const double start = parse_double(key, parts[0]);
        const double step = parse_double(key, parts[1]);
        const double stop = parse_double(key, parts[2]);
        if (!(step > 0.0) || stop < start) throw ConfigError(key + ": empty or invalid range");
        std::vector<double> out;
        const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
        return out;
    }
    std::vector<double> out;
    for (const auto& item : split(v, ',')) out.push_back(parse_double(key, item));
    return out;
}

inline std::vector<std::size_t> parse_uint_list(const std::string& key, const std::string& v) {
    std::vector<std::size_t> out;
    for (const auto& item : split(v, ',')) out.push_back(static_cast<std::size_t>(parse_uint(key, item)));
    return out;
}

}  // namespace detail

/// Applies `key = value` pairs in order on top of `base`.
inline SystemConfig apply_config_pairs(SystemConfig base, const std::vector<std::pair<std::string, std::string>>& pairs) {
    using namespace detail;
    SystemConfig& c = base;
    std::vector<std::size_t> delays = c.channel.delays;
    std::vector<double> powers = c.channel.powers;
    bool powers_db = false;
    Fading fading = c.channel.fading;
    bool channel_touched = false;

    for (const auto& [key, value] : pairs) {
        if (key == "preset") continue;
        if (key == "name") c.name = value;
        else if (key == "waveform.subcarriers") c.subcarriers = parse_uint(key, value);
        else if (key == "waveform.spacing_hz") c.spacing_hz = parse_double(key, value);
        else if (key == "waveform.chirp_rate_hz_per_s") c.chirp_rate = parse_double(key, value);
        else if (key == "waveform.symbol_duration_s") c.symbol_duration_s = parse_double(key, value);
        else if (key == "frame.pilots") c.pilots = parse_uint(key, value);
        else if (key == "frame.nulls") c.nulls = parse_uint(key, value);
        else if (key == "frame.pilot_seed") c.pilot_seed = parse_uint(key, value);
        else if (key == "packet.pn_duration_s") c.pn_duration_s = parse_double(key, value);
        else if (key == "packet.pause_s") c.pause_s = parse_double(key, value);
        else if (key == "packet.guard_s") c.guard_s = parse_double(key, value);
        else if (key == "packet.symbols") c.symbols = parse_uint(key, value);
        else if (key == "packet.pn_seed") c.pn_seed = parse_uint(key, value);
        else if (key == "packet.amplitude") c.amplitude = parse_double(key, value);
        else if (key == "channel.delays") {
            delays = parse_uint_list(key, value);
            channel_touched = true;
        } else if (key == "channel.powers") {
            powers = parse_double_list(key, value);
            powers_db = false;
            channel_touched = true;
        } else if (key == "channel.powers_db") {
            powers = parse_double_list(key, value);
            powers_db = true;
            channel_touched = true;
        } else if (key == "channel.fading") {
            if (value == "fixed") fading = Fading::Fixed;
            else if (value == "rayleigh-block" || value == "rayleigh") fading = Fading::RayleighBlock;
            else throw ConfigError(key + ": expected fixed or rayleigh-block");
            channel_touched = true;
        } else if (key == "channel.cfo_hz") c.cfo_hz = parse_double(key, value);
        else if (key == "channel.timing_offset") c.timing_offset = parse_uint(key, value);
        else if (key == "receiver.sync_window") c.receiver.sync_window = parse_uint(key, value);
        else if (key == "receiver.sync_threshold") c.receiver.sync_threshold = parse_double(key, value);
        else if (key == "receiver.timing_backoff") c.receiver.timing_backoff = parse_uint(key, value);
        else if (key == "receiver.cfo_trim") c.receiver.cfo_trim = parse_uint(key, value);
        else if (key == "receiver.cfo_correction") c.receiver.cfo_correction = parse_bool(key, value);
        else if (key == "receiver.csi") {
            if (value == "pilot") c.receiver.csi = CsiMode::Pilot;
            else if (value == "ideal") c.receiver.csi = CsiMode::Ideal;
            else throw ConfigError(key + ": expected pilot or ideal");
        } else if (key == "modem.scheme") {
            try {
                c.scheme = parse_scheme(value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(key + ": " + e.what());
            }
        } else if (key == "modem.system") {
            try {
                c.system = parse_system(value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(key + ": " + e.what());
            }
        } else if (key == "sweep.systems") {
            c.sweep.systems.clear();
            for (const auto& s : split(value, ',')) c.sweep.systems.push_back(parse_system(s));
        } else if (key == "sweep.schemes") {
            c.sweep.schemes.clear();
            for (const auto& s : split(value, ',')) c.sweep.schemes.push_back(parse_scheme(s));
        } else if (key == "sweep.snr_db") c.sweep.snr_db = parse_double_list(key, value);
        else if (key == "sweep.packets_per_point") c.sweep.packets_per_point = parse_uint(key, value);
        else if (key == "sweep.min_bit_errors") c.sweep.min_bit_errors = parse_uint(key, value);
        else if (key == "sweep.min_bits") c.sweep.min_bits = parse_uint(key, value);
        else if (key == "sweep.seed") c.sweep.seed = parse_uint(key, value);
        else if (key == "sweep.threads") c.sweep.threads = parse_uint(key, value);
        else throw ConfigError("unknown key '" + key + "'");
    }

    if (channel_touched) {
        if (delays.size() != powers.size())
            throw ConfigError("channel.delays and channel.powers must have the same length");
        try {
            c.channel = powers_db ? ChannelProfile::from_db(delays, powers, fading)
                                  : ChannelProfile::normalized(delays, powers, fading);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("channel: ") + e.what());
        }
    }
    return base;
}

inline SystemConfig parse_config(std::istream& in, const std::string& origin = "<config>") {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t line_no = 0;
    SystemConfig base;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string text = detail::trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = detail::trim(std::string_view(text).substr(0, eq));
        std::string value = detail::trim(std::string_view(text).substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        if (key == "preset") {
            const auto it = presets().find(value);
            if (it == presets().end()) throw ConfigError(origin + ": unknown preset '" + value + "'");
            base = it->second();
        }
        pairs.emplace_back(std::move(key), std::move(value));
    }
    try {
        return apply_config_pairs(std::move(base), pairs);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

/// A preset name or a path to a config file.
inline SystemConfig load_config(const std::string& name_or_path) {
    if (const auto it = presets().find(name_or_path); it != presets().end()) return it->second();
    std::ifstream in(name_or_path);
    if (!in) throw ConfigError("cannot open config '" + name_or_path + "'");
    return parse_config(in, name_or_path);
}

}  // namespace mcdm
