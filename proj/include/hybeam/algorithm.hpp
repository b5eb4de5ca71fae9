// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <chrono>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hybeam/conic/solver.hpp"
#include "hybeam/sdr.hpp"

namespace hybeam {

enum class PrecoderMode { Hybrid, Digital };

inline const char* to_string(PrecoderMode m) { return m == PrecoderMode::Hybrid ? "hybrid" : "digital"; }

/// Loop hyper-parameters of the alternating optimization.
struct LoopConfig {
    int n_iter = 1;
    int n_rand = 1;
    double beta = 1.0;
    double solver_tol = 1e-7;
    int solver_max_iter = 100;
    int num_phase_levels = 8; // L, hybrid only
    double delta = 0.0;       // squared analog modulus, hybrid only
    bool check_bounds = false; // track the SDR lower bound on every candidate

    void validate(PrecoderMode mode) const
    {
        if (n_iter < 1 || n_rand < 0 || !(beta > 0.0))
            throw std::invalid_argument("LoopConfig: n_iter >= 1, n_rand >= 0, beta > 0 required");
        if (!(solver_tol > 0.0) || solver_max_iter < 1)
            throw std::invalid_argument("LoopConfig: bad solver settings");
        if (mode == PrecoderMode::Hybrid && (num_phase_levels < 1 || !(delta > 0.0)))
            throw std::invalid_argument("LoopConfig: hybrid mode needs L >= 1 and delta > 0");
    }
};

/// Best parameter set kept across randomization trials. The pair
/// (best_count, -best_power) is lexicographically non-decreasing over the
/// accept events of a run.
struct Incumbent {
    std::optional<AnalogPrecoder> analog; // unset until the first accepted F (hybrid)
    DigitalPrecoderSet precoders;
    CombinerSet combiners;
    double best_power_mw = 1e5; // paper sentinel g~
    int best_count = 0;         // K~
};

/// Candidate acceptance rule: more satisfied users always wins, equal count
/// wins on power with an inclusive comparison.
inline bool accept(int cand_count, double cand_power_mw, const Incumbent& inc)
{
    return cand_count > inc.best_count ||
           (cand_count == inc.best_count && cand_power_mw <= inc.best_power_mw);
}

/// Omnidirectional start: w_k = sqrt(P_rx) e_1 (scaled so ||w_k||^2 = P_rx
/// holds), m_i = e_1, K~ = 0, g~ = 1e5. F stays unset until the first
/// analog pass.
inline Incumbent init_state(int n_rf, int n_rx, const GroupAssignment& groups, const QosTargets& targets)
{
    Incumbent inc;
    inc.precoders = CMat::Zero(n_rf, groups.num_groups());
    inc.precoders.row(0).setOnes();
    inc.combiners = CMat::Zero(n_rx, groups.num_users());
    inc.combiners.row(0).setConstant(std::sqrt(targets.prx_max_mw));
    inc.best_power_mw = 1e5;
    inc.best_count = 0;
    return inc;
}

struct AcceptEvent {
    int iteration; // 1-based
    int stage;     // 1 = analog, 2 = digital, 3 = combiners
    int count;
    double power_mw;
};

struct IterationTraceEntry {
    int best_count;
    double best_power_mw;
};

struct RunTrace {
    std::vector<IterationTraceEntry> iterations;
    std::vector<AcceptEvent> accepts;
    double max_bound_violation = 0.0; // relative, across all checked candidates
    long bound_checks = 0;
};

struct RunMetrics {
    int n_packets = 0;
    double p_tx_dbm = 0.0;
    RVec per_user_sinr_db;
    std::vector<bool> satisfied_mask;
    double wall_time_s = 0.0;
};

struct RunResult {
    Incumbent incumbent;
    RunMetrics metrics;
    RunTrace trace;
};

namespace detail_alg {

inline void require_optimal_like(const conic::SdpSolution& sol, const char* stage)
{
    // slack variables keep every sub-problem feasible; anything else signals
    // a structural defect in the built problem
    if (sol.status == conic::SolveStatus::Infeasible || sol.status == conic::SolveStatus::Unbounded)
        throw std::runtime_error(std::string("alternating optimization: ") + stage +
                                 " relaxation reported " + conic::to_string(sol.status));
}

struct Scorer {
    const ChannelSet& channels;
    const QosTargets& targets;
    const GroupAssignment& groups;

    std::pair<int, double> operator()(const CMat& f, const DigitalPrecoderSet& m,
                                      const CombinerSet& w) const
    {
        const auto sat = count_satisfied(channels, f, m, w, targets, groups);
        return {sat.count, total_tx_power(f, m)};
    }
};

inline void record_bound(RunTrace& trace, double sdr_obj, double cand_obj)
{
    const double viol = (sdr_obj - cand_obj) / (1.0 + std::abs(cand_obj));
    trace.max_bound_violation = std::max(trace.max_bound_violation, viol);
    ++trace.bound_checks;
}

inline RunResult run_loop(PrecoderMode mode,
                          const ChannelSet& channels,
                          const LoopConfig& config,
                          const QosTargets& targets,
                          const GroupAssignment& groups,
                          int n_rf,
                          RngStream& rng)
{
    const auto t_start = std::chrono::steady_clock::now();
    config.validate(mode);
    targets.validate(groups.num_groups());
    channels.validate();
    if (channels.num_users() != groups.num_users())
        throw std::invalid_argument("run: channels do not match group assignment");
    const int n_tx = channels.n_tx();
    const int n_rx = channels.n_rx();
    const int k_users = groups.num_users();
    if (mode == PrecoderMode::Hybrid && !(groups.num_groups() <= n_rf && n_rf <= n_tx))
        throw std::invalid_argument("run: hybrid mode requires G <= N_RF <= N_tx");
    if (mode == PrecoderMode::Digital)
        n_rf = n_tx; // F = I

    PhaseAlphabet alphabet;
    if (mode == PrecoderMode::Hybrid)
        alphabet = PhaseAlphabet(config.num_phase_levels, std::sqrt(config.delta));

    Incumbent inc = init_state(n_rf, n_rx, groups, targets);
    RunTrace trace;
    Scorer score{channels, targets, groups};

    // Working analog matrix: identity in digital mode; in hybrid mode the
    // last accepted F, or the all-zero-phase precoder before any accept
    // (only reachable with n_rand = 0).
    const auto effective_f = [&]() -> CMat {
        if (mode == PrecoderMode::Digital)
            return CMat::Identity(n_tx, n_tx);
        if (inc.analog)
            return inc.analog->realized();
        return CMat::Constant(n_tx, n_rf, alphabet.element(0));
    };

    const auto on_accept = [&](int it, int stage, int count, double power) {
        inc.best_count = count;
        inc.best_power_mw = power;
        trace.accepts.push_back({it, stage, count, power});
    };

    for (int it = 1; it <= config.n_iter; ++it) {
        // ---- stage 1: analog phases --------------------------------------
        if (mode == PrecoderMode::Hybrid && config.n_rand > 0) {
            const auto p1 = build_p1(channels, inc.precoders, inc.combiners, targets, groups,
                                     config.beta, config.delta);
            const auto sol = conic::solve(p1, config.solver_tol, config.solver_max_iter);
            require_optimal_like(sol, "analog");
            const auto lift = extract_lifted_analog(sol);
            for (int r = 0; r < config.n_rand; ++r) {
                const CVec u = sample_unit_sphere(n_rf * n_tx, rng);
                AnalogPrecoder cand = recover_analog(lift.d, alphabet, u, n_tx, n_rf);
                const CMat f_cand = cand.realized();
                const auto [count, power] = score(f_cand, inc.precoders, inc.combiners);
                if (config.check_bounds)
                    record_bound(trace, sol.objective,
                                 penalized_power_objective(channels, f_cand, inc.precoders,
                                                           inc.combiners, targets, groups, config.beta));
                if (accept(count, power, inc)) {
                    inc.analog = std::move(cand);
                    on_accept(it, 1, count, power);
                }
            }
        }

        // ---- stage 2: digital precoders ----------------------------------
        if (config.n_rand > 0) {
            const CMat f = effective_f();
            const auto p2 = build_p2(channels, f, inc.combiners, targets, groups, config.beta);
            const auto sol = conic::solve(p2, config.solver_tol, config.solver_max_iter);
            require_optimal_like(sol, "digital");
            const auto lift = extract_lifted_digital(sol);
            for (int r = 0; r < config.n_rand; ++r) {
                const DigitalPrecoderSet cand = randomize_digital(lift.m, rng);
                const auto [count, power] = score(f, cand, inc.combiners);
                if (config.check_bounds)
                    record_bound(trace, sol.objective,
                                 penalized_power_objective(channels, f, cand, inc.combiners,
                                                           targets, groups, config.beta));
                if (accept(count, power, inc)) {
                    inc.precoders = cand;
                    on_accept(it, 2, count, power);
                }
            }
        }

        // ---- stage 3: combiners, K parallel sub-problems ------------------
        const int reps = k_users > 0 ? config.n_rand / k_users : 0;
        if (reps > 0) {
            const CMat f = effective_f();
            const auto p3s = build_p3(channels, f, inc.precoders, targets, groups);
            for (int k = 0; k < k_users; ++k) {
                const auto sol = conic::solve(p3s[k], config.solver_tol, config.solver_max_iter);
                require_optimal_like(sol, "combiner");
                const auto lift = extract_lifted_combiner(sol);
                for (int r = 0; r < reps; ++r) {
                    const CVec w = randomize_combiner(lift.w, rng, targets.prx_max_mw);
                    CombinerSet cand = inc.combiners;
                    cand.col(k) = w;
                    const auto [count, power] = score(f, inc.precoders, cand);
                    if (config.check_bounds)
                        record_bound(trace, sol.objective,
                                     qos_deficit(channels.h[k], f, inc.precoders, w,
                                                 groups.group_of(k), targets));
                    if (accept(count, power, inc)) {
                        inc.combiners.col(k) = w;
                        on_accept(it, 3, count, power);
                    }
                }
            }
        }

        trace.iterations.push_back({inc.best_count, inc.best_power_mw});
    }

    RunResult out;
    out.metrics.n_packets = inc.best_count;
    out.metrics.p_tx_dbm = inc.best_power_mw > 0.0
                               ? linear_to_dbm(inc.best_power_mw)
                               : -std::numeric_limits<double>::infinity();
    out.metrics.per_user_sinr_db.resize(k_users);
    out.metrics.satisfied_mask.resize(k_users);
    {
        const CMat f = effective_f();
        const auto sat = count_satisfied(channels, f, inc.precoders, inc.combiners, targets, groups);
        for (int k = 0; k < k_users; ++k) {
            const double s = sinr(channels.h[k], f, inc.precoders, inc.combiners.col(k),
                                  groups.group_of(k), targets.sigma2_mw);
            out.metrics.per_user_sinr_db[k] =
                s > 0.0 ? 10.0 * std::log10(s) : -std::numeric_limits<double>::infinity();
            out.metrics.satisfied_mask[k] = sat.mask[k];
        }
    }
    out.metrics.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    out.incumbent = std::move(inc);
    out.trace = std::move(trace);
    return out;
}

} // namespace detail_alg

/// Alternating optimization of F, {m_i}, {w_k}: per outer iteration solve the
/// three relaxations in turn and keep the best randomized candidates under
/// the (count, power) acceptance rule.
inline RunResult run_hybrid(const ChannelSet& channels,
                            const LoopConfig& config,
                            const QosTargets& targets,
                            const GroupAssignment& groups,
                            int n_rf,
                            RngStream& rng)
{
    return detail_alg::run_loop(PrecoderMode::Hybrid, channels, config, targets, groups, n_rf, rng);
}

/// Fully-digital baseline: F = I, alternating over digital precoders and
/// combiners only.
inline RunResult run_digital(const ChannelSet& channels,
                             const LoopConfig& config,
                             const QosTargets& targets,
                             const GroupAssignment& groups,
                             RngStream& rng)
{
    return detail_alg::run_loop(PrecoderMode::Digital, channels, config, targets, groups,
                                channels.n_tx(), rng);
}

} // namespace hybeam
