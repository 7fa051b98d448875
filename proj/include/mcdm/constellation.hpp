// SPDX-License-Identifier: Apache-2.0
//
// Gray-coded constellations with unit average symbol energy.
//
// A point's label is its bit pattern read MSB-first: the first bit of each
// group in the payload is the label's most significant bit. `points()[label]`
// is the constellation point for that label. These tables are normative for
// captures exchanged with other implementations (see README).
#pragma once

#include "mcdm/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mcdm {

enum class Scheme { Bpsk, Qpsk, Psk8, Qam16, Qam32 };

inline constexpr std::array<Scheme, 5> kAllSchemes = {Scheme::Bpsk, Scheme::Qpsk, Scheme::Psk8, Scheme::Qam16,
                                                      Scheme::Qam32};

inline std::string_view scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Bpsk: return "BPSK";
        case Scheme::Qpsk: return "QPSK";
        case Scheme::Psk8: return "8PSK";
        case Scheme::Qam16: return "16QAM";
        case Scheme::Qam32: return "32QAM";
    }
    return "?";
}

/// Case-insensitive; accepts "8psk"/"psk8", "16qam"/"qam16" and so on.
inline Scheme parse_scheme(std::string_view text) {
    std::string s;
    for (char c : text)
        if (c != '-' && c != '_' && !std::isspace(static_cast<unsigned char>(c)))
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "bpsk") return Scheme::Bpsk;
    if (s == "qpsk") return Scheme::Qpsk;
    if (s == "8psk" || s == "psk8") return Scheme::Psk8;
    if (s == "16qam" || s == "qam16") return Scheme::Qam16;
    if (s == "32qam" || s == "qam32") return Scheme::Qam32;
    throw std::invalid_argument("unknown modulation scheme '" + std::string(text) + "'");
}

namespace detail {

// Two-bit per-axis Gray levels for square 16QAM: 00 -3, 01 -1, 11 +1, 10 +3.
inline double gray4_level(unsigned bits) {
    static constexpr std::array<double, 4> level = {-3.0, -1.0, 3.0, 1.0};
    return level[bits & 3u];
}

// Cross 32QAM, quasi-Gray. Coordinates in units of half the minimum
// distance; average energy 20. Found by minimizing the mean Hamming distance
// over nearest-neighbor pairs (56 bits over 52 pairs).
inline constexpr std::array<std::array<int, 2>, 32> kQam32Table = {{
    {5, -3},  {3, -3},  {-1, -3}, {1, -3},  {5, -1},  {3, -1},  {-1, -1}, {1, -1},
    {5, 3},   {3, 3},   {-1, 3},  {1, 3},   {5, 1},   {3, 1},   {-1, 1},  {1, 1},
    {-3, -5}, {3, -5},  {-1, -5}, {1, -5},  {-3, -3}, {-5, -3}, {-3, -1}, {-5, -1},
    {-3, 5},  {3, 5},   {-1, 5},  {1, 5},   {-3, 3},  {-5, 3},  {-3, 1},  {-5, 1},
}};

}  // namespace detail

class Constellation {
public:
    explicit Constellation(Scheme scheme) : scheme_(scheme) {
        switch (scheme) {
            case Scheme::Bpsk:
                bits_ = 1;
                points_ = {cf64{1.0, 0.0}, cf64{-1.0, 0.0}};
                break;
            case Scheme::Qpsk: {
                bits_ = 2;
                const double a = 1.0 / std::sqrt(2.0);
                for (unsigned label = 0; label < 4; ++label)
                    points_.emplace_back((label & 2u) ? -a : a, (label & 1u) ? -a : a);
                break;
            }
            case Scheme::Psk8: {
                bits_ = 3;
                points_.resize(8);
                // Position i around the circle carries the Gray code of i.
                for (unsigned i = 0; i < 8; ++i) points_[i ^ (i >> 1)] = std::polar(1.0, 2.0 * kPi * i / 8.0);
                break;
            }
            case Scheme::Qam16: {
                bits_ = 4;
                const double scale = 1.0 / std::sqrt(10.0);
                for (unsigned label = 0; label < 16; ++label)
                    points_.emplace_back(scale * detail::gray4_level(label >> 2), scale * detail::gray4_level(label));
                break;
            }
            case Scheme::Qam32: {
                bits_ = 5;
                const double scale = 1.0 / std::sqrt(20.0);
                for (const auto& p : detail::kQam32Table) points_.emplace_back(scale * p[0], scale * p[1]);
                break;
            }
        }
    }

    Scheme scheme() const { return scheme_; }
    std::string_view name() const { return scheme_name(scheme_); }
    std::size_t bits_per_symbol() const { return bits_; }
    std::size_t size() const { return points_.size(); }
    const CVec& points() const { return points_; }

    /// Label of the bits at `bits[0 .. bits_per_symbol)`, MSB first.
    unsigned label_of(std::span<const std::uint8_t> bits) const {
        unsigned label = 0;
        for (std::size_t b = 0; b < bits_; ++b) label = (label << 1) | (bits[b] & 1u);
        return label;
    }

    void append_bits(unsigned label, Bits& out) const {
        for (std::size_t b = bits_; b-- > 0;) out.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
    }

private:
    Scheme scheme_;
    std::size_t bits_ = 0;
    CVec points_;
};

inline CVec map_bits(std::span<const std::uint8_t> bits, const Constellation& c) {
    const std::size_t bps = c.bits_per_symbol();
    if (bits.size() % bps != 0)
        throw std::invalid_argument("map_bits: " + std::to_string(bits.size()) + " bits is not a multiple of " +
                                    std::to_string(bps));
    CVec out;
    out.reserve(bits.size() / bps);
    for (std::size_t i = 0; i < bits.size(); i += bps) out.push_back(c.points()[c.label_of(bits.subspan(i, bps))]);
    return out;
}

/// Hard demapping by nearest point (ties go to the lowest label).
inline unsigned nearest_label(cf64 value, const Constellation& c) {
    unsigned best = 0;
    double best_d = std::norm(value - c.points()[0]);
    for (unsigned i = 1; i < c.size(); ++i) {
        const double d = std::norm(value - c.points()[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

inline Bits demap_symbols(std::span<const cf64> symbols, const Constellation& c) {
    Bits out;
    out.reserve(symbols.size() * c.bits_per_symbol());
    for (cf64 s : symbols) c.append_bits(nearest_label(s, c), out);
    return out;
}

}  // namespace mcdm
