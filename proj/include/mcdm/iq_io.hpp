// SPDX-License-Identifier: Apache-2.0
//
// Raw I/Q capture files: interleaved little-endian float32 I,Q pairs with
// no header (the GNU Radio complex64 file layout). Metadata lives in a
// sidecar "<path>.meta" of key=value lines: sample_rate_hz and, optionally,
// center_freq_hz.
#pragma once

#include "mcdm/config.hpp"
#include "mcdm/types.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcdm {

struct IqMetadata {
    double sample_rate_hz = 0.0;
    std::optional<double> center_freq_hz;
};

inline std::string iq_meta_path(const std::string& path) { return path + ".meta"; }

namespace detail {

inline std::uint32_t to_little_endian(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        v = ((v & 0xFF) << 24) | ((v & 0xFF00) << 8) | ((v >> 8) & 0xFF00) | (v >> 24);
    }
    return v;
}

}  // namespace detail

inline void write_iq(const std::string& path, const BasebandSignal& signal,
                     std::optional<double> center_freq_hz = std::nullopt) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("write_iq: cannot open '" + path + "'");
    std::vector<std::uint32_t> words;
    words.reserve(2 * signal.size());
    for (const cf64& s : signal.samples) {
        for (float f : {static_cast<float>(s.real()), static_cast<float>(s.imag())})
            words.push_back(detail::to_little_endian(std::bit_cast<std::uint32_t>(f)));
    }
    out.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(words.size() * 4));
    if (!out) throw std::runtime_error("write_iq: write to '" + path + "' failed");

    std::ofstream meta(iq_meta_path(path), std::ios::trunc);
    if (!meta) throw std::runtime_error("write_iq: cannot open '" + iq_meta_path(path) + "'");
    meta.precision(17);
    meta << "sample_rate_hz=" << signal.sample_rate << '\n';
    if (center_freq_hz) meta << "center_freq_hz=" << *center_freq_hz << '\n';
}

inline IqMetadata read_iq_metadata(const std::string& path) {
    IqMetadata md;
    std::ifstream in(iq_meta_path(path));
    if (!in) return md;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (key == "sample_rate_hz") md.sample_rate_hz = detail::parse_double(key, value);
        else if (key == "center_freq_hz") md.center_freq_hz = detail::parse_double(key, value);
    }
    return md;
}

/// Reads a capture. The sample rate comes from the sidecar when present,
/// otherwise `fallback_rate`.
inline BasebandSignal read_iq(const std::string& path, double fallback_rate = 0.0) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_iq: cannot open '" + path + "'");
    const auto bytes = std::filesystem::file_size(path);
    if (bytes % 8 != 0)
        throw std::runtime_error("read_iq: '" + path + "' is corrupt (" + std::to_string(bytes) +
                                 " bytes is not a whole number of float32 I/Q pairs)");
    std::vector<std::uint32_t> words(bytes / 4);
    in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(bytes));
    if (!in) throw std::runtime_error("read_iq: short read on '" + path + "'");
    BasebandSignal out;
    out.samples.reserve(words.size() / 2);
    for (std::size_t i = 0; i < words.size(); i += 2) {
        const float re = std::bit_cast<float>(detail::to_little_endian(words[i]));
        const float im = std::bit_cast<float>(detail::to_little_endian(words[i + 1]));
        out.samples.emplace_back(re, im);
    }
    const IqMetadata md = read_iq_metadata(path);
    out.sample_rate = md.sample_rate_hz > 0.0 ? md.sample_rate_hz : fallback_rate;
    return out;
}

}  // namespace mcdm
