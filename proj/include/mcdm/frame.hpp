// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mcdm/chirp_basis.hpp"
#include "mcdm/pn.hpp"
#include "mcdm/types.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcdm {

enum class Role : std::uint8_t { Data, Pilot, Null };

/// Comb-pilot subcarrier allocation, fixed over time.
///
/// Pilots sit at 0, L, 2L, ..., (K_p - 1) L with L = K / K_p. Nulls take the
/// K_n / 2 lowest and the remaining highest non-pilot indices (edge guard
/// bands), leaving the pilot comb unbroken. Everything else carries data in
/// ascending index order.
class FrameLayout {
public:
    FrameLayout(std::size_t subcarriers, std::size_t pilots, std::size_t nulls, std::vector<double> pilot_symbols)
        : roles_(subcarriers, Role::Data), pilot_symbols_(std::move(pilot_symbols)) {
        if (pilots == 0 || subcarriers % pilots != 0)
            throw std::invalid_argument("FrameLayout: pilot count " + std::to_string(pilots) +
                                        " must divide the subcarrier count " + std::to_string(subcarriers));
        if (nulls > subcarriers - pilots)
            throw std::invalid_argument("FrameLayout: more nulls than non-pilot subcarriers");
        if (pilot_symbols_.size() != pilots)
            throw std::invalid_argument("FrameLayout: need one pilot symbol per pilot subcarrier");
        for (double p : pilot_symbols_)
            if (p != 1.0 && p != -1.0) throw std::invalid_argument("FrameLayout: pilot symbols must be +1 or -1");

        spacing_ = subcarriers / pilots;
        for (std::size_t i = 0; i < pilots; ++i) roles_[i * spacing_] = Role::Pilot;

        std::vector<std::size_t> non_pilot;
        for (std::size_t k = 0; k < subcarriers; ++k)
            if (roles_[k] != Role::Pilot) non_pilot.push_back(k);
        const std::size_t low = nulls / 2;
        for (std::size_t i = 0; i < low; ++i) roles_[non_pilot[i]] = Role::Null;
        for (std::size_t i = 0; i < nulls - low; ++i) roles_[non_pilot[non_pilot.size() - 1 - i]] = Role::Null;

        for (std::size_t k = 0; k < subcarriers; ++k) {
            switch (roles_[k]) {
                case Role::Pilot: pilot_idx_.push_back(k); break;
                case Role::Null: null_idx_.push_back(k); break;
                case Role::Data: data_idx_.push_back(k); break;
            }
        }
    }

    /// Layout with pilot values drawn from gen_pn(pilots, pilot_seed).
    static FrameLayout comb(std::size_t subcarriers, std::size_t pilots, std::size_t nulls, std::uint64_t pilot_seed) {
        return FrameLayout(subcarriers, pilots, nulls, gen_pn(pilots, pilot_seed));
    }

    std::size_t subcarriers() const { return roles_.size(); }
    std::size_t pilot_count() const { return pilot_idx_.size(); }
    std::size_t null_count() const { return null_idx_.size(); }
    std::size_t data_count() const { return data_idx_.size(); }
    /// Pilot spacing L.
    std::size_t spacing() const { return spacing_; }

    Role role(std::size_t k) const { return roles_.at(k); }
    const std::vector<std::size_t>& pilot_indices() const { return pilot_idx_; }
    const std::vector<std::size_t>& null_indices() const { return null_idx_; }
    const std::vector<std::size_t>& data_indices() const { return data_idx_; }
    const std::vector<double>& pilot_symbols() const { return pilot_symbols_; }

private:
    std::vector<Role> roles_;
    std::vector<double> pilot_symbols_;
    std::vector<std::size_t> pilot_idx_, null_idx_, data_idx_;
    std::size_t spacing_ = 1;
};

/// A frequency-domain frame is a spectrum whose roles come from a layout.
using FrequencyFrame = Spectrum;

inline FrequencyFrame build_frame(std::span<const cf64> data_symbols, const FrameLayout& layout) {
    if (data_symbols.size() != layout.data_count())
        throw std::invalid_argument("build_frame: expected " + std::to_string(layout.data_count()) +
                                    " data symbols, got " + std::to_string(data_symbols.size()));
    FrequencyFrame frame{CVec(layout.subcarriers())};
    for (std::size_t i = 0; i < layout.pilot_count(); ++i)
        frame[layout.pilot_indices()[i]] = layout.pilot_symbols()[i];
    for (std::size_t i = 0; i < data_symbols.size(); ++i) frame[layout.data_indices()[i]] = data_symbols[i];
    return frame;
}

/// Values at the data subcarriers, in layout order.
inline CVec extract_data(const Spectrum& frame, const FrameLayout& layout) {
    if (frame.size() != layout.subcarriers()) throw std::invalid_argument("extract_data: length mismatch");
    CVec out;
    out.reserve(layout.data_count());
    for (std::size_t k : layout.data_indices()) out.push_back(frame[k]);
    return out;
}

}  // namespace mcdm
