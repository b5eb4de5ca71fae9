// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "hybeam/channel.hpp"
#include "hybeam/precoding.hpp"

namespace hybeam::harness {

/// Locale-independent number formatting: 10 significant digits, '.' decimal.
inline std::string format_number(double v)
{
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 10);
    return std::string(buf, res.ptr);
}

inline std::string format_number(std::int64_t v)
{
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_number(std::uint64_t v)
{
    char buf[24];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::ofstream open_csv(const std::string& path)
{
    std::ofstream out(path, std::ios::binary); // binary keeps LF endings everywhere
    if (!out)
        throw std::runtime_error("emit_csv: cannot open " + path + " for writing");
    return out;
}

/// Per-realization run rows.
struct RunRecord {
    std::string sweep_point;
    int realization = 0;
    std::uint64_t seed = 0;
    std::string mode;
    int n_packets = 0;
    double p_tx_dbm = 0.0;
    std::string mask; // '1'/'0' per user, user 0 first
    double wall_time_s = 0.0;
    bool ok = true;
    std::string error; // set when ok == false; row is skipped on emit
};

inline void emit_run_csv(const std::vector<RunRecord>& rows, const std::string& path)
{
    auto out = open_csv(path);
    out << "sweep_point,realization,seed,mode,n_packets,p_tx_dbm,mask,wall_time_s\n";
    for (const auto& r : rows) {
        if (!r.ok)
            continue;
        out << r.sweep_point << ',' << r.realization << ',' << format_number(r.seed) << ',' << r.mode
            << ',' << r.n_packets << ',' << format_number(r.p_tx_dbm) << ',' << r.mask << ','
            << format_number(r.wall_time_s) << '\n';
    }
    if (!out)
        throw std::runtime_error("emit_csv: write failure on " + path);
}

/// Aggregates per sweep point and mode. Power is averaged in linear mW and
/// converted to dBm afterwards.
struct AggregateRow {
    std::string sweep_point;
    std::string mode;
    double mean_n_packets = 0.0;
    double mean_p_tx_dbm = 0.0;
    int n_realizations = 0;
};

inline void emit_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path)
{
    auto out = open_csv(path);
    out << "sweep_point,mode,mean_n_packets,mean_p_tx_dbm,n_realizations\n";
    for (const auto& r : rows)
        out << r.sweep_point << ',' << r.mode << ',' << format_number(r.mean_n_packets) << ','
            << format_number(r.mean_p_tx_dbm) << ',' << r.n_realizations << '\n';
    if (!out)
        throw std::runtime_error("emit_csv: write failure on " + path);
}

inline void emit_histogram_csv(const CorrelationHistogram& hist, const std::string& path)
{
    auto out = open_csv(path);
    out << "bin_low,bin_high,intra_prob,inter_prob\n";
    for (Eigen::Index b = 0; b < hist.bin_low.size(); ++b)
        out << format_number(hist.bin_low[b]) << ',' << format_number(hist.bin_high[b]) << ','
            << format_number(hist.intra_prob[b]) << ',' << format_number(hist.inter_prob[b]) << '\n';
    if (!out)
        throw std::runtime_error("emit_csv: write failure on " + path);
}

inline void emit_pattern_csv(const BeamPattern& pattern, const std::string& path)
{
    auto out = open_csv(path);
    out << "angle_deg,magnitude\n";
    for (Eigen::Index i = 0; i < pattern.angle_deg.size(); ++i)
        out << format_number(pattern.angle_deg[i]) << ',' << format_number(pattern.magnitude[i]) << '\n';
    if (!out)
        throw std::runtime_error("emit_csv: write failure on " + path);
}

inline std::string mask_to_string(const std::vector<bool>& mask)
{
    std::string s(mask.size(), '0');
    for (size_t i = 0; i < mask.size(); ++i)
        if (mask[i])
            s[i] = '1';
    return s;
}

} // namespace hybeam::harness
