// SPDX-License-Identifier: Apache-2.0
//
// BER result files. CSV columns, in order:
//
//   system,scheme,snr_db,bits_sent,bit_errors,ber,packets,seed
//
// JSON lines carry the same eight fields per object. Wall time is kept out
// of both so that equal seeds give byte-identical files.
#pragma once

#include "mcdm/config.hpp"
#include "mcdm/sweep.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcdm {

enum class ResultFormat { Csv, Jsonl };

inline constexpr const char* kCsvHeader = "system,scheme,snr_db,bits_sent,bit_errors,ber,packets,seed";

namespace detail {

inline std::string shortest(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// 17 significant digits, trailing zeros kept: exact round trip and never
/// fewer than 6 digits.
inline std::string ber_text(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.17g", v);
    return buf;
}

/// JSON has no infinities; the noiseless SNR point is written as "inf".
inline nlohmann::json snr_to_json(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

inline double snr_from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse_double("snr_db", j.get<std::string>());
    return j.get<double>();
}

}  // namespace detail

inline std::string to_csv_row(const BerRecord& r) {
    std::ostringstream os;
    os << system_name(r.system) << ',' << scheme_name(r.scheme) << ',' << detail::shortest(r.snr_db) << ','
       << r.bits_sent << ',' << r.bit_errors << ',' << detail::ber_text(r.ber) << ',' << r.packets << ',' << r.seed;
    return os.str();
}

inline nlohmann::json to_json(const BerRecord& r) {
    return {{"system", system_name(r.system)}, {"scheme", scheme_name(r.scheme)}, {"snr_db", detail::snr_to_json(r.snr_db)},
            {"bits_sent", r.bits_sent},        {"bit_errors", r.bit_errors},       {"ber", r.ber},
            {"packets", r.packets},            {"seed", r.seed}};
}

/// Writes records to `path`. With `append`, rows go after the existing
/// content and the CSV header is only written if the file is empty.
inline void write_results(const std::vector<BerRecord>& records, const std::string& path, ResultFormat format,
                          bool append = false) {
    const bool has_content =
        append && std::filesystem::exists(path) && std::filesystem::file_size(path) > 0;
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw std::runtime_error("write_results: cannot open '" + path + "'");
    if (format == ResultFormat::Csv) {
        if (!has_content) out << kCsvHeader << '\n';
        for (const auto& r : records) out << to_csv_row(r) << '\n';
    } else {
        for (const auto& r : records) out << to_json(r).dump() << '\n';
    }
    if (!out) throw std::runtime_error("write_results: write to '" + path + "' failed");
}

inline std::vector<BerRecord> read_results(const std::string& path, ResultFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_results: cannot open '" + path + "'");
    std::vector<BerRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        BerRecord r;
        try {
            if (format == ResultFormat::Csv) {
                if (line == kCsvHeader) continue;
                const auto f = detail::split(line, ',');
                if (f.size() != 8) throw std::runtime_error("expected 8 fields");
                r.system = parse_system(f[0]);
                r.scheme = parse_scheme(f[1]);
                r.snr_db = detail::parse_double("snr_db", f[2]);
                r.bits_sent = detail::parse_uint("bits_sent", f[3]);
                r.bit_errors = detail::parse_uint("bit_errors", f[4]);
                r.ber = detail::parse_double("ber", f[5]);
                r.packets = detail::parse_uint("packets", f[6]);
                r.seed = detail::parse_uint("seed", f[7]);
            } else {
                const auto j = nlohmann::json::parse(line);
                r.system = parse_system(j.at("system").get<std::string>());
                r.scheme = parse_scheme(j.at("scheme").get<std::string>());
                r.snr_db = detail::snr_from_json(j.at("snr_db"));
                r.bits_sent = j.at("bits_sent").get<std::uint64_t>();
                r.bit_errors = j.at("bit_errors").get<std::uint64_t>();
                r.ber = j.at("ber").get<double>();
                r.packets = j.at("packets").get<std::uint64_t>();
                r.seed = j.at("seed").get<std::uint64_t>();
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace mcdm
