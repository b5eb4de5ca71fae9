// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <array>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "hybeam/algorithm.hpp"
#include "hybeam/channel.hpp"

namespace hybeam::harness {

enum class DeltaMode { PerEq3d, PerObservation, Explicit };
enum class RunMode { Hybrid, Digital, Both };

inline const char* to_string(RunMode m)
{
    switch (m) {
    case RunMode::Hybrid: return "hybrid";
    case RunMode::Digital: return "digital";
    case RunMode::Both: return "both";
    }
    return "?";
}

/// Full description of one experiment: dimensions, alphabet, QoS targets,
/// geometry, loop counts, realization count and master seed.
struct ScenarioConfig {
    int n_tx = 8;
    int n_rx = 2;
    int n_rf = 5;
    int k_users = 12;
    int n_groups = 3;
    std::vector<double> gamma_db = {4.0}; // one shared value or one per group
    double sigma2_dbm = 10.0;
    double prx_dbm = 10.0;
    int num_phase_levels = 8;
    DeltaMode delta_mode = DeltaMode::PerEq3d;
    double delta_value = 0.0; // used with DeltaMode::Explicit
    int num_paths = 8;

    // angle geometry: explicit per-group/per-user means, or ranges sampled
    // once per realization
    std::vector<double> aod_means_deg;                    // size G when set
    std::array<double, 2> aod_mean_range_deg = {-80.0, 80.0};
    std::vector<double> aoa_means_deg;                    // size K when set
    std::array<double, 2> aoa_mean_range_deg = {-360.0, 360.0};
    double aod_spread_deg = 30.0;
    double aoa_spread_deg = 60.0;
    double element_spacing = 0.5;

    int n_iter = 2;
    int n_rand = 100;
    double beta_override = 0.0; // <= 0 applies the G^3 N_RF N_tx N_rx rule
    bool n_rand_rule = false;   // N_rand = 400 + 300 (N_tx + N_rx - 11) on N_rx sweeps
    int n_realizations = 20;
    std::uint64_t master_seed = 1;
    RunMode mode = RunMode::Hybrid;
    double solver_tol = 1e-7;
    int solver_max_iter = 100;
    bool check_bounds = false;
    std::vector<int> group_sizes; // optional; default splits evenly

    void validate() const
    {
        auto fail = [](const std::string& field, const std::string& why) {
            throw std::invalid_argument("ScenarioConfig: field '" + field + "' " + why);
        };
        if (n_tx < 1) fail("n_tx", "must be >= 1");
        if (n_rx < 1) fail("n_rx", "must be >= 1");
        if (k_users < 1) fail("k_users", "must be >= 1");
        if (n_groups < 1 || n_groups > k_users) fail("n_groups", "must satisfy 1 <= G <= K");
        if (mode != RunMode::Digital && !(n_groups <= n_rf && n_rf <= n_tx))
            fail("n_rf", "must satisfy G <= n_rf <= n_tx in hybrid mode");
        if (gamma_db.empty() || (int(gamma_db.size()) != 1 && int(gamma_db.size()) != n_groups))
            fail("gamma_db", "needs one shared value or one value per group");
        if (num_phase_levels < 1) fail("num_phase_levels", "must be >= 1");
        if (delta_mode == DeltaMode::Explicit && !(delta_value > 0.0))
            fail("delta_value", "must be > 0 with delta_mode = explicit");
        if (num_paths < 1) fail("num_paths", "must be >= 1");
        if (!aod_means_deg.empty() && int(aod_means_deg.size()) != n_groups)
            fail("aod_means_deg", "must list one mean per group");
        if (!aoa_means_deg.empty() && int(aoa_means_deg.size()) != k_users)
            fail("aoa_means_deg", "must list one mean per user");
        if (aod_spread_deg < 0.0) fail("aod_spread_deg", "must be >= 0");
        if (aoa_spread_deg < 0.0) fail("aoa_spread_deg", "must be >= 0");
        if (!(element_spacing > 0.0)) fail("element_spacing", "must be > 0");
        if (n_iter < 1) fail("n_iter", "must be >= 1");
        if (n_rand < 0) fail("n_rand", "must be >= 0");
        if (n_realizations < 1) fail("n_realizations", "must be >= 1");
        if (!(solver_tol > 0.0)) fail("solver_tol", "must be > 0");
        if (solver_max_iter < 1) fail("solver_max_iter", "must be >= 1");
        if (!group_sizes.empty()) {
            if (int(group_sizes.size()) != n_groups)
                fail("group_sizes", "must list one size per group");
            if (std::accumulate(group_sizes.begin(), group_sizes.end(), 0) != k_users)
                fail("group_sizes", "must sum to k_users");
            for (int s : group_sizes)
                if (s < 1)
                    fail("group_sizes", "entries must be >= 1");
        }
    }

    /// Analog squared modulus. Eq-(3d) mode enforces ||F||_F^2 = N_RF exactly
    /// (delta = 1/N_tx); observation mode uses the paper's 1/N_RF instead.
    double delta() const
    {
        switch (delta_mode) {
        case DeltaMode::PerEq3d: return 1.0 / double(n_tx);
        case DeltaMode::PerObservation: return 1.0 / double(n_rf);
        case DeltaMode::Explicit: return delta_value;
        }
        return 1.0 / double(n_tx);
    }

    /// Regularization weight: G^3 N_RF N_tx N_rx unless overridden; digital
    /// runs count N_RF = N_tx.
    double beta(PrecoderMode m) const
    {
        if (beta_override > 0.0)
            return beta_override;
        const double rf = m == PrecoderMode::Digital ? double(n_tx) : double(n_rf);
        return std::pow(double(n_groups), 3) * rf * double(n_tx) * double(n_rx);
    }

    QosTargets targets() const
    {
        RVec g(n_groups);
        for (int i = 0; i < n_groups; ++i)
            g[i] = gamma_db.size() == 1 ? gamma_db[0] : gamma_db[i];
        return QosTargets::from_db(g, sigma2_dbm, prx_dbm);
    }

    GroupAssignment groups() const
    {
        if (group_sizes.empty())
            return GroupAssignment::even_split(k_users, n_groups);
        std::vector<std::vector<int>> members(n_groups);
        int u = 0;
        for (int i = 0; i < n_groups; ++i)
            for (int j = 0; j < group_sizes[i]; ++j)
                members[i].push_back(u++);
        return GroupAssignment(std::move(members));
    }

    LoopConfig loop_config(PrecoderMode m) const
    {
        LoopConfig c;
        c.n_iter = n_iter;
        c.n_rand = n_rand;
        c.beta = beta(m);
        c.solver_tol = solver_tol;
        c.solver_max_iter = solver_max_iter;
        c.num_phase_levels = num_phase_levels;
        c.delta = delta();
        c.check_bounds = check_bounds;
        return c;
    }

    ArrayGeometry tx_geometry() const { return {n_tx, element_spacing}; }
    ArrayGeometry rx_geometry() const { return {n_rx, element_spacing}; }

    /// Angle profile for one realization: explicit means when configured,
    /// otherwise uniform draws from the configured ranges (group means first,
    /// then user means).
    AngleProfile sample_profile(RngStream& rng) const
    {
        AngleProfile p;
        if (!aod_means_deg.empty()) {
            p.group_mean_aod_deg = aod_means_deg;
        } else {
            for (int i = 0; i < n_groups; ++i)
                p.group_mean_aod_deg.push_back(rng.uniform(aod_mean_range_deg[0], aod_mean_range_deg[1]));
        }
        if (!aoa_means_deg.empty()) {
            p.user_mean_aoa_deg = aoa_means_deg;
        } else {
            for (int k = 0; k < k_users; ++k)
                p.user_mean_aoa_deg.push_back(rng.uniform(aoa_mean_range_deg[0], aoa_mean_range_deg[1]));
        }
        p.spread_aod_deg = aod_spread_deg;
        p.spread_aoa_deg = aoa_spread_deg;
        p.num_paths = num_paths;
        return p;
    }
};

namespace detail_cfg {

template <typename T>
T require_field(const nlohmann::json& j, const char* name)
{
    if (!j.contains(name))
        throw std::invalid_argument(std::string("ScenarioConfig: missing required field '") + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument(std::string("ScenarioConfig: field '") + name + "' has the wrong type");
    }
}

} // namespace detail_cfg

inline ScenarioConfig config_from_json(const nlohmann::json& j)
{
    using detail_cfg::require_field;
    ScenarioConfig c;
    c.n_tx = require_field<int>(j, "n_tx");
    c.n_rx = require_field<int>(j, "n_rx");
    c.k_users = require_field<int>(j, "k_users");
    c.n_groups = require_field<int>(j, "n_groups");

    if (j.contains("gamma_db")) {
        if (j.at("gamma_db").is_array())
            c.gamma_db = j.at("gamma_db").get<std::vector<double>>();
        else
            c.gamma_db = {j.at("gamma_db").get<double>()};
    }

    const std::string mode = j.value("mode", std::string("hybrid"));
    if (mode == "hybrid")
        c.mode = RunMode::Hybrid;
    else if (mode == "digital")
        c.mode = RunMode::Digital;
    else if (mode == "both")
        c.mode = RunMode::Both;
    else
        throw std::invalid_argument("ScenarioConfig: field 'mode' must be hybrid|digital|both");

    if (c.mode == RunMode::Digital)
        c.n_rf = j.value("n_rf", c.n_tx);
    else
        c.n_rf = require_field<int>(j, "n_rf");

    c.sigma2_dbm = j.value("sigma2_dbm", 10.0);
    c.prx_dbm = j.value("prx_dbm", 10.0);
    c.num_phase_levels = j.value("num_phase_levels", 8);

    const std::string dm = j.value("delta_mode", std::string("per_eq3d"));
    if (dm == "per_eq3d")
        c.delta_mode = DeltaMode::PerEq3d;
    else if (dm == "per_observation")
        c.delta_mode = DeltaMode::PerObservation;
    else if (dm == "explicit")
        c.delta_mode = DeltaMode::Explicit;
    else
        throw std::invalid_argument(
            "ScenarioConfig: field 'delta_mode' must be per_eq3d|per_observation|explicit");
    c.delta_value = j.value("delta_value", 0.0);

    c.num_paths = j.value("num_paths", 8);
    if (j.contains("aod_means_deg"))
        c.aod_means_deg = j.at("aod_means_deg").get<std::vector<double>>();
    if (j.contains("aod_mean_range_deg")) {
        const auto r = j.at("aod_mean_range_deg").get<std::vector<double>>();
        if (r.size() != 2)
            throw std::invalid_argument("ScenarioConfig: field 'aod_mean_range_deg' needs [lo, hi]");
        c.aod_mean_range_deg = {r[0], r[1]};
    }
    if (j.contains("aoa_means_deg"))
        c.aoa_means_deg = j.at("aoa_means_deg").get<std::vector<double>>();
    if (j.contains("aoa_mean_range_deg")) {
        const auto r = j.at("aoa_mean_range_deg").get<std::vector<double>>();
        if (r.size() != 2)
            throw std::invalid_argument("ScenarioConfig: field 'aoa_mean_range_deg' needs [lo, hi]");
        c.aoa_mean_range_deg = {r[0], r[1]};
    }
    c.aod_spread_deg = j.value("aod_spread_deg", 30.0);
    c.aoa_spread_deg = j.value("aoa_spread_deg", 60.0);
    c.element_spacing = j.value("element_spacing", 0.5);

    c.n_iter = j.value("n_iter", 2);
    c.n_rand = j.value("n_rand", 100);
    c.beta_override = j.value("beta", 0.0);
    c.n_rand_rule = j.value("n_rand_rule", false);
    c.n_realizations = j.value("n_realizations", 20);
    c.master_seed = j.value("master_seed", std::uint64_t(1));
    c.solver_tol = j.value("solver_tol", 1e-7);
    c.solver_max_iter = j.value("solver_max_iter", 100);
    c.check_bounds = j.value("check_bounds", false);
    if (j.contains("group_sizes"))
        c.group_sizes = j.at("group_sizes").get<std::vector<int>>();

    c.validate();
    return c;
}

inline ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("load_config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("load_config: " + path + " is not well-formed JSON: " + e.what());
    }
    return config_from_json(j);
}

/// N_rand rule for receive-antenna sweeps, clamped to at least one draw.
inline int n_rand_for_rx_sweep(int n_tx, int n_rx)
{
    return std::max(1, 400 + 300 * (n_tx + n_rx - 11));
}

} // namespace hybeam::harness
