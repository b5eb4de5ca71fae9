// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "hybeam/hybeam.hpp"

namespace {

using namespace hybeam;
using namespace hybeam::harness;

struct CommonOpts {
    std::string config_path;
    std::string preset;
    bool desk = false;
    bool full_scale = false;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string mode;
    int workers = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o)
{
    cmd->add_option("--config", o.config_path, "scenario config JSON");
    cmd->add_option("--preset", o.preset, "built-in preset: fig1|fig2|fig3|fig4|fig5");
    cmd->add_flag("--desk", o.desk, "desk-scale preset variant (default)");
    cmd->add_flag("--full-scale", o.full_scale, "paper-scale preset variant (long running)");
    cmd->add_option("--out", o.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", o.seed, "override the master seed")->each([&o](const std::string&) {
        o.seed_set = true;
    });
    cmd->add_option("--mode", o.mode, "override run mode: hybrid|digital|both")
        ->check(CLI::IsMember({"hybrid", "digital", "both"}));
    cmd->add_option("--workers", o.workers, "worker threads for realizations")
        ->check(CLI::PositiveNumber);
}

RunMode parse_mode(const std::string& m)
{
    if (m == "hybrid")
        return RunMode::Hybrid;
    if (m == "digital")
        return RunMode::Digital;
    return RunMode::Both;
}

void apply_overrides(std::vector<SweepPoint>& points, const CommonOpts& o)
{
    for (auto& p : points) {
        if (o.seed_set)
            p.config.master_seed = o.seed;
        if (!o.mode.empty())
            p.config.mode = parse_mode(o.mode);
    }
}

// Resolves either --config or --preset into sweep points; `expected_command`
// names the subcommand so presets of another kind are rejected early.
std::vector<SweepPoint> resolve_points(const CommonOpts& o, const std::string& expected_command,
                                       const std::string& axis = "",
                                       const std::string& values = "")
{
    if (o.config_path.empty() == o.preset.empty())
        throw std::invalid_argument("give exactly one of --config or --preset");
    if (o.desk && o.full_scale)
        throw std::invalid_argument("--desk and --full-scale are mutually exclusive");

    std::vector<SweepPoint> points;
    if (!o.preset.empty()) {
        const Preset p = make_preset(o.preset, o.full_scale);
        if (p.command != expected_command)
            throw std::invalid_argument("preset '" + o.preset + "' belongs to the '" + p.command +
                                        "' subcommand");
        if (o.full_scale)
            std::cerr << "warning: --full-scale mirrors the paper's dimensions and can run very long\n";
        points = p.points;
    } else {
        const ScenarioConfig base = load_config(o.config_path);
        if (expected_command == "sweep" && !axis.empty()) {
            std::vector<std::pair<double, double>> vals;
            std::stringstream ss(values);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto colon = item.find(':');
                if (colon == std::string::npos)
                    vals.push_back({std::stod(item), 0.0});
                else
                    vals.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
            }
            points = expand_axis(base, axis, vals);
        } else {
            points = single_point(base);
            points[0].label = expected_command == "sweep" ? "single" : expected_command;
        }
    }
    return points;
}

void report_failures(const SweepResult& result)
{
    for (const auto& f : result.failures)
        std::cerr << "warning: point " << f.sweep_point << " realization " << f.realization << " ("
                  << f.mode << ") failed: " << f.message << "\n";
}

int cmd_run_or_sweep(const CommonOpts& o, const std::string& axis, const std::string& values,
                     bool is_sweep)
{
    auto points = resolve_points(o, "sweep", is_sweep ? axis : "", values);
    if (!is_sweep && points.size() != 1)
        throw std::invalid_argument("'run' expects a single-point scenario; use 'sweep' for axes");
    apply_overrides(points, o);

    const SweepResult result = run_sweep(points, o.workers);
    report_failures(result);

    std::filesystem::create_directories(o.out_dir);
    emit_run_csv(result.records, o.out_dir + "/run.csv");
    emit_aggregate_csv(result.aggregates, o.out_dir + "/aggregate.csv");
    std::cout << "wrote " << o.out_dir << "/run.csv and " << o.out_dir << "/aggregate.csv\n";
    for (const auto& a : result.aggregates)
        std::cout << "  " << a.sweep_point << " [" << a.mode << "] mean N_packets "
                  << format_number(a.mean_n_packets) << ", mean P_tx "
                  << format_number(a.mean_p_tx_dbm) << " dBm over " << a.n_realizations
                  << " realizations\n";
    return 0;
}

int cmd_corrhist(const CommonOpts& o, int bins)
{
    auto points = resolve_points(o, "corrhist");
    apply_overrides(points, o);
    const CorrelationHistogram hist = correlation_experiment(points[0].config, bins);
    std::filesystem::create_directories(o.out_dir);
    emit_histogram_csv(hist, o.out_dir + "/corrhist.csv");
    std::cout << "wrote " << o.out_dir << "/corrhist.csv\n"
              << "  intra-cluster mean correlation " << format_number(hist.intra_mean) << " over "
              << hist.intra_count << " pairs\n"
              << "  inter-cluster mean correlation " << format_number(hist.inter_mean) << " over "
              << hist.inter_count << " pairs\n";
    return 0;
}

int cmd_beampattern(const CommonOpts& o)
{
    auto points = resolve_points(o, "beampattern");
    apply_overrides(points, o);
    const ScenarioConfig& cfg = points[0].config;
    const GroupAssignment groups = cfg.groups();
    const QosTargets targets = cfg.targets();

    RngStream channel_rng = RngStream::derive(cfg.master_seed, {0x11, 0, 0});
    const AngleProfile profile = cfg.sample_profile(channel_rng);
    const ChannelSet channels =
        sample_channel(cfg.tx_geometry(), cfg.rx_geometry(), profile, groups, channel_rng);

    const PrecoderMode mode = cfg.mode == RunMode::Digital ? PrecoderMode::Digital : PrecoderMode::Hybrid;
    RngStream run_rng = RngStream::derive(cfg.master_seed,
                                          {0x22, 0, 0, std::uint64_t(mode == PrecoderMode::Hybrid ? 1 : 2)});
    const RunResult res = mode == PrecoderMode::Hybrid
                              ? run_hybrid(channels, cfg.loop_config(mode), targets, groups, cfg.n_rf, run_rng)
                              : run_digital(channels, cfg.loop_config(mode), targets, groups, run_rng);

    const CMat f = mode == PrecoderMode::Digital ? CMat(CMat::Identity(cfg.n_tx, cfg.n_tx))
                   : res.incumbent.analog
                       ? res.incumbent.analog->realized()
                       : CMat(CMat::Constant(cfg.n_tx, cfg.n_rf,
                                             PhaseAlphabet(cfg.num_phase_levels, std::sqrt(cfg.delta())).element(0)));

    RVec tx_grid(361), rx_grid(361);
    for (int i = 0; i <= 360; ++i) {
        tx_grid[i] = -90.0 + 0.5 * i;  // transmitter sector
        rx_grid[i] = 90.0 + 0.5 * i;   // receivers face the transmitter
    }

    std::filesystem::create_directories(o.out_dir);
    for (int i = 0; i < groups.num_groups(); ++i) {
        const auto pat = tx_beam_pattern(f, res.incumbent.precoders.col(i), cfg.tx_geometry(), tx_grid);
        emit_pattern_csv(pat, o.out_dir + "/pattern_tx_group" + std::to_string(i) + ".csv");
    }
    for (int k = 0; k < groups.num_users(); ++k) {
        const auto pat = rx_beam_pattern(res.incumbent.combiners.col(k), cfg.rx_geometry(), rx_grid);
        emit_pattern_csv(pat, o.out_dir + "/pattern_rx_user" + std::to_string(k) + ".csv");
    }
    std::cout << "wrote beam patterns for " << groups.num_groups() << " groups and "
              << groups.num_users() << " users to " << o.out_dir << " (N_packets "
              << res.metrics.n_packets << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"hybeam: hybrid multi-group multicast precoding simulator"};
    app.require_subcommand(1);

    CommonOpts run_opts, sweep_opts, corr_opts, beam_opts;
    std::string axis, values;
    int bins = 50;

    CLI::App* run_cmd = app.add_subcommand("run", "single scenario, all realizations");
    add_common(run_cmd, run_opts);

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep one axis across scenarios");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--axis", axis, "sweep axis: n_rf|n_rx|n_rand_iter|gamma");
    sweep_cmd->add_option("--values", values,
                          "comma-separated axis values; n_rand_iter items as RAND:ITER");

    CLI::App* corr_cmd = app.add_subcommand("corrhist", "channel correlation histogram");
    add_common(corr_cmd, corr_opts);
    corr_cmd->add_option("--bins", bins, "histogram bin count")->check(CLI::PositiveNumber);

    CLI::App* beam_cmd = app.add_subcommand("beampattern", "emit designed beam patterns");
    add_common(beam_cmd, beam_opts);

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed())
            return cmd_run_or_sweep(run_opts, "", "", false);
        if (sweep_cmd->parsed())
            return cmd_run_or_sweep(sweep_opts, axis, values, true);
        if (corr_cmd->parsed())
            return cmd_corrhist(corr_opts, bins);
        if (beam_cmd->parsed())
            return cmd_beampattern(beam_opts);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // parse problems are validation errors
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}
