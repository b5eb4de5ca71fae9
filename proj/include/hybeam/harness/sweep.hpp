// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <atomic>
#include <thread>
#include <utility>

#include "hybeam/harness/config.hpp"
#include "hybeam/harness/csv.hpp"

namespace hybeam::harness {

/// One sweep point: a label plus the fully resolved config for that point.
struct SweepPoint {
    std::string label;
    ScenarioConfig config;
};

/// Expands a sweep axis into per-point configs. Supported axes:
///   n_rf        values are RF-chain counts
///   n_rx        values are receive antenna counts (optionally rescaling
///               N_rand via the 400 + 300 (N_tx + N_rx - 11) rule)
///   gamma       values are SINR targets in dB (shared by all groups)
///   n_rand_iter values are (n_rand, n_iter) pairs
inline std::vector<SweepPoint> expand_axis(const ScenarioConfig& base,
                                           const std::string& axis,
                                           const std::vector<std::pair<double, double>>& values)
{
    base.validate();
    if (values.empty())
        throw std::invalid_argument("expand_axis: no sweep values given");
    std::vector<SweepPoint> points;
    for (const auto& [a, b] : values) {
        ScenarioConfig c = base;
        std::string label;
        if (axis == "n_rf") {
            c.n_rf = int(a);
            label = "n_rf=" + std::to_string(int(a));
        } else if (axis == "n_rx") {
            c.n_rx = int(a);
            if (c.n_rand_rule)
                c.n_rand = n_rand_for_rx_sweep(c.n_tx, c.n_rx);
            label = "n_rx=" + std::to_string(int(a));
        } else if (axis == "gamma") {
            c.gamma_db = {a};
            label = "gamma_db=" + format_number(a);
        } else if (axis == "n_rand_iter") {
            c.n_rand = int(a);
            c.n_iter = int(b);
            label = "n_rand=" + std::to_string(int(a)) + ";n_iter=" + std::to_string(int(b));
        } else {
            throw std::invalid_argument("expand_axis: unknown axis '" + axis +
                                        "' (use n_rf|n_rx|n_rand_iter|gamma)");
        }
        c.validate();
        points.push_back({std::move(label), std::move(c)});
    }
    return points;
}

inline std::vector<SweepPoint> single_point(const ScenarioConfig& config)
{
    config.validate();
    return {{"single", config}};
}

struct SweepFailure {
    std::string sweep_point;
    int realization = 0;
    std::string mode;
    std::string message;
};

struct SweepResult {
    std::vector<RunRecord> records;      // deterministic (point, realization, mode) order
    std::vector<AggregateRow> aggregates;
    std::vector<SweepFailure> failures;
};

namespace detail_sweep {

// stream purposes; fixed tags keep streams independent of evaluation order
inline constexpr std::uint64_t kChannelTag = 0x11;
inline constexpr std::uint64_t kRunTag = 0x22;

inline RunRecord run_one(const SweepPoint& point, std::uint64_t point_index, int realization,
                         PrecoderMode mode)
{
    const ScenarioConfig& cfg = point.config;
    RunRecord rec;
    rec.sweep_point = point.label;
    rec.realization = realization;
    rec.mode = to_string(mode);
    rec.seed = RngStream::derive_seed(cfg.master_seed, {kChannelTag, point_index, std::uint64_t(realization)});
    try {
        const GroupAssignment groups = cfg.groups();
        RngStream channel_rng(rec.seed);
        const AngleProfile profile = cfg.sample_profile(channel_rng);
        const ChannelSet channels =
            sample_channel(cfg.tx_geometry(), cfg.rx_geometry(), profile, groups, channel_rng);

        RngStream run_rng = RngStream::derive(
            cfg.master_seed, {kRunTag, point_index, std::uint64_t(realization),
                              std::uint64_t(mode == PrecoderMode::Hybrid ? 1 : 2)});
        const QosTargets targets = cfg.targets();
        const LoopConfig loop = cfg.loop_config(mode);
        const RunResult res = mode == PrecoderMode::Hybrid
                                  ? run_hybrid(channels, loop, targets, groups, cfg.n_rf, run_rng)
                                  : run_digital(channels, loop, targets, groups, run_rng);
        rec.n_packets = res.metrics.n_packets;
        rec.p_tx_dbm = res.metrics.p_tx_dbm;
        rec.mask = mask_to_string(res.metrics.satisfied_mask);
        rec.wall_time_s = res.metrics.wall_time_s;
        if (loop.check_bounds && res.trace.max_bound_violation > 1e-7) {
            rec.ok = false;
            rec.error = "relaxation bound violated by " + format_number(res.trace.max_bound_violation);
        }
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
    }
    return rec;
}

} // namespace detail_sweep

/// Per-(point, mode) means over the successful records, in the given point
/// order. Power is averaged in the linear milliwatt domain and converted to
/// dBm afterwards (never a mean of dB values).
inline std::vector<AggregateRow> aggregate_records(const std::vector<RunRecord>& records,
                                                   const std::vector<std::string>& point_order)
{
    std::vector<AggregateRow> rows;
    for (const auto& label : point_order) {
        for (const char* mode : {"hybrid", "digital"}) {
            double packets = 0.0, power_mw = 0.0;
            int n = 0;
            for (const auto& rec : records) {
                if (!rec.ok || rec.sweep_point != label || rec.mode != mode)
                    continue;
                packets += rec.n_packets;
                power_mw += dbm_to_linear(rec.p_tx_dbm);
                ++n;
            }
            if (n > 0)
                rows.push_back({label, mode, packets / n, linear_to_dbm(power_mw / n), n});
        }
    }
    return rows;
}

/// Runs every (point, realization, mode) task, optionally on several worker
/// threads. Each task derives its own rng streams from (master_seed, point,
/// realization), so results do not depend on the worker count or on
/// completion order; rows are stored in deterministic task order.
inline SweepResult run_sweep(const std::vector<SweepPoint>& points, int workers = 1)
{
    if (points.empty())
        throw std::invalid_argument("run_sweep: no sweep points");

    struct Task {
        const SweepPoint* point;
        std::uint64_t point_index;
        int realization;
        PrecoderMode mode;
    };
    std::vector<Task> tasks;
    for (std::uint64_t ip = 0; ip < points.size(); ++ip) {
        const RunMode m = points[ip].config.mode;
        for (int r = 0; r < points[ip].config.n_realizations; ++r) {
            if (m == RunMode::Hybrid || m == RunMode::Both)
                tasks.push_back({&points[ip], ip, r, PrecoderMode::Hybrid});
            if (m == RunMode::Digital || m == RunMode::Both)
                tasks.push_back({&points[ip], ip, r, PrecoderMode::Digital});
        }
    }

    SweepResult out;
    out.records.resize(tasks.size());
    workers = std::max(1, workers);
    if (workers == 1) {
        for (size_t i = 0; i < tasks.size(); ++i)
            out.records[i] = detail_sweep::run_one(*tasks[i].point, tasks[i].point_index,
                                                   tasks[i].realization, tasks[i].mode);
    } else {
        std::atomic<size_t> next{0};
        auto work = [&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= tasks.size())
                    return;
                out.records[i] = detail_sweep::run_one(*tasks[i].point, tasks[i].point_index,
                                                       tasks[i].realization, tasks[i].mode);
            }
        };
        std::vector<std::thread> pool;
        const size_t n_threads = std::min<size_t>(size_t(workers), tasks.size());
        for (size_t w = 0; w < n_threads; ++w)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }

    for (const auto& rec : out.records)
        if (!rec.ok)
            out.failures.push_back({rec.sweep_point, rec.realization, rec.mode, rec.error});

    std::vector<std::string> order;
    for (const auto& point : points)
        order.push_back(point.label);
    out.aggregates = aggregate_records(out.records, order);
    return out;
}

/// Multi-realization channel-correlation statistics for a config (the
/// correlation histogram experiment); consumes only channel streams.
inline CorrelationHistogram correlation_experiment(const ScenarioConfig& cfg, int num_bins = 50)
{
    cfg.validate();
    const GroupAssignment groups = cfg.groups();
    CorrelationAccumulator acc(num_bins);
    for (int r = 0; r < cfg.n_realizations; ++r) {
        RngStream rng = RngStream::derive(cfg.master_seed,
                                          {detail_sweep::kChannelTag, 0, std::uint64_t(r)});
        const AngleProfile profile = cfg.sample_profile(rng);
        acc.add(sample_channel(cfg.tx_geometry(), cfg.rx_geometry(), profile, groups, rng), groups);
    }
    return acc.finish();
}

} // namespace hybeam::harness
