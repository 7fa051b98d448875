// SPDX-License-Identifier: Apache-2.0
//
// Byte payloads for the tx / rx tools. Bytes are unpacked MSB first, so
// the first byte's top bit is the first payload bit.
#pragma once

#include "mcdm/types.hpp"

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcdm {

inline Bits bytes_to_bits(std::span<const std::uint8_t> bytes) {
    Bits out;
    out.reserve(bytes.size() * 8);
    for (std::uint8_t b : bytes)
        for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((b >> i) & 1u));
    return out;
}

/// Packs bits MSB first; a trailing partial byte is zero-filled.
inline std::vector<std::uint8_t> bits_to_bytes(std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] & 1u) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    return out;
}

inline std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace mcdm
