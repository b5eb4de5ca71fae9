// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Acceptance suite: runs every shipped acceptance criterion at its stated
// tolerance and prints one pass/fail line per criterion. Criterion 10 shells
// out to the CLI binary (path in argv[1]) to compare whole executions.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "hybeam/hybeam.hpp"

using namespace hybeam;
using namespace hybeam::harness;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail, double seconds)
{
    std::ostringstream line;
    line << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << detail << " ("
         << format_number(seconds) << " s)";
    std::cout << line.str() << std::endl;
    if (!pass)
        ++g_failures;
}

template <typename Fn>
void run_criterion(int criterion, Fn&& fn)
{
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        std::tie(pass, detail) = fn();
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(criterion, pass, detail, dt);
}

double find_mean_packets(const std::vector<AggregateRow>& rows, const std::string& point,
                         const std::string& mode)
{
    for (const auto& r : rows)
        if (r.sweep_point == point && r.mode == mode)
            return r.mean_n_packets;
    throw std::runtime_error("aggregate row not found: " + point + "/" + mode);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Analytic single-user oracle
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion1()
{
    const GroupAssignment groups = GroupAssignment::even_split(1, 1);
    QosTargets targets;
    targets.gamma_linear = RVec::Constant(1, dbm_to_linear(4.0));
    targets.sigma2_mw = dbm_to_linear(10.0);
    targets.prx_max_mw = dbm_to_linear(10.0);

    LoopConfig cfg;
    cfg.n_iter = 2;
    cfg.n_rand = 2000;
    cfg.beta = 1.0 * 4 * 4 * 1; // G^3 N_RF N_tx N_rx at N_tx = N_RF = 4

    AngleProfile prof;
    prof.group_mean_aod_deg = {10.0};
    prof.user_mean_aoa_deg = {-30.0};
    prof.spread_aod_deg = 30.0;
    prof.spread_aoa_deg = 60.0;
    prof.num_paths = 8;

    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RngStream crng = RngStream::derive(seed, {0xC1});
        const ChannelSet cs = sample_channel({4, 0.5}, {1, 0.5}, prof, groups, crng);
        RngStream rng = RngStream::derive(seed, {0xA1});
        const RunResult res = run_digital(cs, cfg, targets, groups, rng);
        const double opt = targets.gamma_linear[0] * targets.sigma2_mw / cs.h[0].squaredNorm();
        if (res.metrics.n_packets != 1)
            return {false, "seed " + std::to_string(seed) + " left the user unserved"};
        worst = std::max(worst, std::abs(res.incumbent.best_power_mw - opt) / opt);
    }
    return {worst <= 0.02, "digital single-user power within 2% of gamma sigma2 / ||h||^2; worst " +
                               format_number(worst * 100.0) + "% over 10 seeds"};
}

// ---------------------------------------------------------------------------
// 2. Phase-projection equivalence
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion2()
{
    RngStream rng(0xC2);
    int checked = 0;
    for (int t = 0; t < 200; ++t) {
        const int levels = (t % 3 == 0) ? 4 : (t % 3 == 1 ? 8 : 16);
        const int n_tx = 2 + int(rng.next_u64() % 3); // lift dim n_tx * n_rf <= 12
        const int n_rf = 1 + int(rng.next_u64() % (12 / n_tx > 3 ? 3 : 12 / n_tx));
        const int n = n_tx * n_rf;
        const PhaseAlphabet alphabet(levels, std::sqrt(1.0 / n_tx));
        CMat g(n, n);
        for (int i = 0; i < n * n; ++i)
            g(i) = rng.cgaussian();
        const CMat d_hat = g * g.adjoint();
        const CVec u = sample_unit_sphere(n, rng);
        const AnalogPrecoder rec = recover_analog(d_hat, alphabet, u, n_tx, n_rf);

        const CMat q = conic::psd_factor(d_hat);
        for (int e = 0; e < n; ++e) {
            const cplx z = cplx(q.col(e).adjoint() * u);
            int best = 0;
            double best_val = (alphabet.element(0) * z).real();
            for (int l = 1; l < levels; ++l) {
                const double v = (alphabet.element(l) * z).real();
                if (v > best_val) {
                    best_val = v;
                    best = l;
                }
            }
            if (rec.index(e % n_tx, e / n_tx) != best)
                return {false, "mismatch at instance " + std::to_string(t)};
            ++checked;
        }
    }
    return {true, "recover_analog matches exhaustive per-entry search on 200 instances (" +
                      std::to_string(checked) + " entries, exact)"};
}

// ---------------------------------------------------------------------------
// 3. Solver correctness
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion3()
{
    // three analytic programs
    {
        conic::SdpProblem p;
        p.blocks = {{"x", 1}};
        p.objective_blocks = {CMat::Ones(1, 1)};
        conic::SdpProblem::Constraint c;
        c.block_coeffs = {-CMat::Ones(1, 1)};
        c.sense = conic::SdpProblem::Sense::LessEqual;
        c.rhs = -3.0;
        p.constraints.push_back(c);
        const auto s = conic::solve(p, 1e-8, 100);
        if (s.status != conic::SolveStatus::Optimal || std::abs(s.objective - 3.0) > 1e-6)
            return {false, "scalar bound program missed the optimum"};
    }
    {
        conic::SdpProblem p;
        p.blocks = {{"X", 2}};
        CMat c(2, 2);
        c << 0.0, 1.0, 1.0, 0.0;
        p.objective_blocks = {c};
        for (int i = 0; i < 2; ++i) {
            conic::SdpProblem::Constraint con;
            CMat e = CMat::Zero(2, 2);
            e(i, i) = 1.0;
            con.block_coeffs = {e};
            con.rhs = 1.0;
            p.constraints.push_back(con);
        }
        const auto s = conic::solve(p, 1e-8, 100);
        if (s.status != conic::SolveStatus::Optimal || std::abs(s.objective + 2.0) > 1e-6)
            return {false, "maxcut-type program missed the optimum"};
    }
    {
        conic::SdpProblem p;
        p.blocks = {{"X", 2}};
        p.objective_blocks = {CMat::Identity(2, 2)};
        conic::SdpProblem::Constraint c;
        c.block_coeffs = {CMat::Identity(2, 2)};
        c.rhs = -1.0;
        p.constraints.push_back(c);
        if (conic::solve(p, 1e-7, 100).status != conic::SolveStatus::Infeasible)
            return {false, "negative-trace program not flagged infeasible"};
    }

    // 100 random strictly feasible instances, blocks up to 16x16
    RngStream rng(0xC3);
    auto random_hermitian = [&](int n) {
        CMat a(n, n);
        for (int i = 0; i < n * n; ++i)
            a(i) = rng.cgaussian();
        return CMat(0.5 * (a + a.adjoint()));
    };
    auto random_psd = [&](int n, double ridge) {
        CMat a(n, n);
        for (int i = 0; i < n * n; ++i)
            a(i) = rng.cgaussian();
        return CMat(a * a.adjoint() + ridge * CMat::Identity(n, n));
    };
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int nb = 1 + int(rng.next_u64() % 2);
        const int m = 2 + int(rng.next_u64() % 6);
        conic::SdpProblem p;
        std::vector<CMat> x0, zsum;
        for (int b = 0; b < nb; ++b) {
            const int dim = 2 + int(rng.next_u64() % 15);
            p.blocks.push_back({"B" + std::to_string(b), dim});
            x0.push_back(random_psd(dim, 0.5));
            zsum.push_back(random_psd(dim, 0.5));
        }
        RVec y0(m);
        for (int i = 0; i < m; ++i)
            y0[i] = rng.gaussian();
        for (int i = 0; i < m; ++i) {
            conic::SdpProblem::Constraint con;
            double rhs = 0.0;
            for (int b = 0; b < nb; ++b) {
                CMat a = random_hermitian(p.blocks[b].dim);
                rhs += (a * x0[b]).trace().real();
                zsum[b] += y0[i] * a;
                con.block_coeffs.push_back(std::move(a));
            }
            con.rhs = rhs;
            p.constraints.push_back(std::move(con));
        }
        p.objective_blocks = zsum;
        const auto s = conic::solve(p, 1e-7, 100);
        if (s.status != conic::SolveStatus::Optimal)
            return {false, "random instance " + std::to_string(t) + " did not reach optimal"};
        worst = std::max({worst, s.primal_residual, s.dual_residual, s.duality_gap});
    }
    return {worst <= 1e-6, "3 analytic programs within 1e-6; 100 random instances with "
                           "residuals/gap <= 1e-6 (worst " + format_number(worst) + ")"};
}

// ---------------------------------------------------------------------------
// 4. Relaxation bound on every solve of a desk-scale run
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion4()
{
    ScenarioConfig cfg;
    cfg.n_tx = 8;
    cfg.n_rx = 2;
    cfg.n_rf = 5;
    cfg.k_users = 12;
    cfg.n_groups = 3;
    cfg.gamma_db = {4.0};
    cfg.n_iter = 2;
    cfg.n_rand = 60;
    cfg.check_bounds = true;

    double worst = -1e300;
    long checks = 0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        RngStream crng = RngStream::derive(seed, {0xC4});
        const GroupAssignment groups = cfg.groups();
        const AngleProfile prof = cfg.sample_profile(crng);
        const ChannelSet cs = sample_channel(cfg.tx_geometry(), cfg.rx_geometry(), prof, groups, crng);
        RngStream h_rng = RngStream::derive(seed, {0xA4, 1});
        const RunResult h = run_hybrid(cs, cfg.loop_config(PrecoderMode::Hybrid), cfg.targets(),
                                       groups, cfg.n_rf, h_rng);
        RngStream d_rng = RngStream::derive(seed, {0xA4, 2});
        const RunResult d = run_digital(cs, cfg.loop_config(PrecoderMode::Digital), cfg.targets(),
                                        groups, d_rng);
        worst = std::max({worst, h.trace.max_bound_violation, d.trace.max_bound_violation});
        checks += h.trace.bound_checks + d.trace.bound_checks;
    }
    return {worst <= 1e-7 && checks > 0,
            "SDR optimum below every randomized candidate's penalized objective over " +
                std::to_string(checks) + " checks (worst relative violation " +
                format_number(worst) + ")"};
}

// ---------------------------------------------------------------------------
// 5. Lexicographic incumbent monotonicity over 50 randomized runs
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion5()
{
    long events = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        RngStream mix = RngStream::derive(seed, {0xC5});
        const int n_tx = 4 + int(mix.next_u64() % 3);
        const int n_groups = 1 + int(mix.next_u64() % 2);
        const int k_users = n_groups * (2 + int(mix.next_u64() % 2));
        const int n_rf = std::min(n_tx, n_groups + 1 + int(mix.next_u64() % 2));
        const bool hybrid = mix.next_u64() % 2 == 0;

        ScenarioConfig cfg;
        cfg.n_tx = n_tx;
        cfg.n_rx = 2;
        cfg.n_rf = n_rf;
        cfg.k_users = k_users;
        cfg.n_groups = n_groups;
        cfg.gamma_db = {2.0 + double(mix.next_u64() % 5)};
        cfg.n_iter = 2;
        cfg.n_rand = 30;
        cfg.mode = hybrid ? RunMode::Hybrid : RunMode::Digital;

        const GroupAssignment groups = cfg.groups();
        const AngleProfile prof = cfg.sample_profile(mix);
        ChannelSet cs = sample_channel(cfg.tx_geometry(), cfg.rx_geometry(), prof, groups, mix);
        RngStream rng = RngStream::derive(seed, {0xA5});
        const RunResult res =
            hybrid ? run_hybrid(cs, cfg.loop_config(PrecoderMode::Hybrid), cfg.targets(), groups,
                                cfg.n_rf, rng)
                   : run_digital(cs, cfg.loop_config(PrecoderMode::Digital), cfg.targets(), groups, rng);
        for (size_t i = 1; i < res.trace.accepts.size(); ++i) {
            const auto& a = res.trace.accepts[i - 1];
            const auto& b = res.trace.accepts[i];
            if (!(b.count > a.count || (b.count == a.count && b.power_mw <= a.power_mw)))
                return {false, "violation at seed " + std::to_string(seed)};
        }
        events += long(res.trace.accepts.size());
    }
    return {events > 0, "(K~, -g~) non-decreasing across " + std::to_string(events) +
                            " accept events in 50 randomized runs"};
}

// ---------------------------------------------------------------------------
// 6-8. Desk-scale trend analogs of the three sweeps
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion6()
{
    const Preset p = make_preset("fig1", false);
    const SweepResult res = run_sweep(p.points, 1);
    if (!res.failures.empty())
        return {false, std::to_string(res.failures.size()) + " realizations failed"};
    const double m3 = find_mean_packets(res.aggregates, "n_rf=3", "hybrid");
    const double m5 = find_mean_packets(res.aggregates, "n_rf=5", "hybrid");
    const double m8 = find_mean_packets(res.aggregates, "n_rf=8", "hybrid");
    const bool pass = m5 >= m3 - 0.5 && m8 >= m5 - 0.5;
    return {pass, "hybrid mean N_packets over N_RF {3,5,8}: " + format_number(m3) + " -> " +
                      format_number(m5) + " -> " + format_number(m8) +
                      " (non-decreasing within 0.5)"};
}

std::pair<bool, std::string> criterion7()
{
    const Preset p = make_preset("fig2", false);
    const SweepResult res = run_sweep(p.points, 1);
    if (!res.failures.empty())
        return {false, std::to_string(res.failures.size()) + " realizations failed"};
    const double m1 = find_mean_packets(res.aggregates, "n_rx=1", "hybrid");
    const double m2 = find_mean_packets(res.aggregates, "n_rx=2", "hybrid");
    const double gain = (m2 - m1) / m1;
    return {gain >= 0.15, "hybrid mean N_packets " + format_number(m1) + " at N_rx=1 vs " +
                              format_number(m2) + " at N_rx=2: +" +
                              format_number(gain * 100.0) + "% (needs >= 15%)"};
}

std::pair<bool, std::string> criterion8()
{
    const Preset p = make_preset("fig3", false);
    const SweepResult res = run_sweep(p.points, 1);
    if (!res.failures.empty())
        return {false, std::to_string(res.failures.size()) + " realizations failed"};
    std::vector<double> m;
    for (const char* label : {"n_rand=1;n_iter=2", "n_rand=25;n_iter=2", "n_rand=100;n_iter=2"})
        m.push_back(find_mean_packets(res.aggregates, label, "hybrid"));
    const bool pass = m[1] >= m[0] - 0.5 && m[2] >= m[1] - 0.5;
    return {pass, "hybrid mean N_packets over N_rand {1,25,100}: " + format_number(m[0]) + " -> " +
                      format_number(m[1]) + " -> " + format_number(m[2]) +
                      " (non-decreasing within 0.5)"};
}

// ---------------------------------------------------------------------------
// 9. Correlation statistics of the paper-scale histogram preset
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion9()
{
    Preset p = make_preset("fig4", true);
    p.points[0].config.n_realizations = 30;
    const CorrelationHistogram hist = correlation_experiment(p.points[0].config, 50);
    const bool pass = hist.intra_mean >= 0.19 && hist.intra_mean <= 0.29 &&
                      hist.inter_mean >= 0.05 && hist.inter_mean <= 0.15;
    return {pass, "intra mean " + format_number(hist.intra_mean) + " in [0.19, 0.29], inter mean " +
                      format_number(hist.inter_mean) + " in [0.05, 0.15] over 30 realizations"};
}

// ---------------------------------------------------------------------------
// 10. Determinism of whole CLI executions
// ---------------------------------------------------------------------------
std::string canonicalize_wall_time(const std::string& run_csv)
{
    std::string out;
    std::stringstream ss(run_csv);
    std::string line;
    while (std::getline(ss, line)) {
        out += line.substr(0, line.rfind(','));
        out += '\n';
    }
    return out;
}

std::pair<bool, std::string> criterion10(const std::string& cli)
{
    namespace fs = std::filesystem;
    const std::string base = "acceptance_out";
    fs::remove_all(base);
    fs::create_directories(base);

    auto exec = [&](const std::string& args) {
        const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0)
            throw std::runtime_error("CLI execution failed: " + cmd);
    };

    // two executions each of a sweep preset, the histogram preset and the
    // beam-pattern preset
    exec("sweep --preset fig2 --desk --seed 42 --out " + base + "/sweep_a");
    exec("sweep --preset fig2 --desk --seed 42 --out " + base + "/sweep_b");
    exec("corrhist --preset fig4 --desk --seed 42 --out " + base + "/hist_a");
    exec("corrhist --preset fig4 --desk --seed 42 --out " + base + "/hist_b");
    exec("beampattern --preset fig5 --desk --seed 42 --out " + base + "/beam_a");
    exec("beampattern --preset fig5 --desk --seed 42 --out " + base + "/beam_b");

    if (read_file(base + "/sweep_a/aggregate.csv") != read_file(base + "/sweep_b/aggregate.csv"))
        return {false, "aggregate.csv differs between executions"};
    if (canonicalize_wall_time(read_file(base + "/sweep_a/run.csv")) !=
        canonicalize_wall_time(read_file(base + "/sweep_b/run.csv")))
        return {false, "run.csv differs between executions beyond the wall_time_s column"};
    if (read_file(base + "/hist_a/corrhist.csv") != read_file(base + "/hist_b/corrhist.csv"))
        return {false, "corrhist.csv differs between executions"};
    for (int i = 0; i < 4; ++i) {
        const std::string f = "/pattern_tx_group" + std::to_string(i) + ".csv";
        if (read_file(base + "/beam_a" + f) != read_file(base + "/beam_b" + f))
            return {false, "tx pattern differs between executions"};
        const std::string g = "/pattern_rx_user" + std::to_string(i) + ".csv";
        if (read_file(base + "/beam_a" + g) != read_file(base + "/beam_b" + g))
            return {false, "rx pattern differs between executions"};
    }
    return {true, "repeated preset executions byte-identical (run.csv compared outside the "
                  "physical wall_time_s column)"};
}

// ---------------------------------------------------------------------------
// 11. Structural invariants on 500 randomized cases
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion11()
{
    RngStream rng(0xC11);
    const GroupAssignment groups = GroupAssignment::even_split(4, 2);
    for (int t = 0; t < 500; ++t) {
        // alphabet closure
        const int levels = 2 + int(rng.next_u64() % 15);
        const PhaseAlphabet alphabet(levels, rng.uniform(0.1, 2.0));
        const int l = int(rng.next_u64() % levels);
        if (alphabet.quantize(alphabet.element(l)) != l)
            return {false, "alphabet closure failed at case " + std::to_string(t)};

        // combiner norm restoration
        const double prx = rng.uniform(0.5, 20.0);
        CMat a(2, 2);
        for (int i = 0; i < 4; ++i)
            a(i) = rng.cgaussian();
        const CVec w = randomize_combiner(a * a.adjoint(), rng, prx);
        if (std::abs(w.squaredNorm() - prx) > 1e-12 * std::max(1.0, prx))
            return {false, "combiner norm failed at case " + std::to_string(t)};

        // psd_factor reconstruction
        const int dim = 2 + int(rng.next_u64() % 7);
        CMat g(dim, dim);
        for (int i = 0; i < dim * dim; ++i)
            g(i) = rng.cgaussian();
        const CMat x = g * g.adjoint();
        const CMat q = conic::psd_factor(x);
        if ((q.transpose() * q.conjugate() - x).norm() > 1e-8 * (1.0 + x.norm()))
            return {false, "psd_factor reconstruction failed at case " + std::to_string(t)};

        // solved P1 keeps diag(D) = delta at solver tolerance
        const int n_tx = 3, n_rf = 2;
        const double delta = 1.0 / n_tx;
        AngleProfile prof;
        prof.group_mean_aod_deg = {rng.uniform(-60, 0), rng.uniform(0, 60)};
        prof.user_mean_aoa_deg = {rng.uniform(-180, 180), rng.uniform(-180, 180),
                                  rng.uniform(-180, 180), rng.uniform(-180, 180)};
        prof.spread_aod_deg = 20.0;
        prof.spread_aoa_deg = 40.0;
        prof.num_paths = 3;
        const ChannelSet cs = sample_channel({n_tx, 0.5}, {2, 0.5}, prof, groups, rng);
        QosTargets targets;
        targets.gamma_linear = RVec::Constant(2, rng.uniform(0.5, 3.0));
        targets.sigma2_mw = 1.0;
        targets.prx_max_mw = prx;
        DigitalPrecoderSet m(n_rf, 2);
        for (int i = 0; i < m.size(); ++i)
            m(i) = rng.cgaussian();
        CombinerSet combiners(2, 4);
        for (int k = 0; k < 4; ++k) {
            CVec wk = rng.cgaussian_vector(2);
            combiners.col(k) = wk * std::sqrt(prx) / wk.norm();
        }
        const auto p1 = build_p1(cs, m, combiners, targets, groups, 50.0, delta);
        const auto sol = conic::solve(p1, 1e-7, 100);
        if (sol.status != conic::SolveStatus::Optimal)
            return {false, "P1 solve not optimal at case " + std::to_string(t)};
        for (int i = 0; i < sol.block_values[0].rows(); ++i)
            if (std::abs(sol.block_values[0](i, i).real() - delta) > 1e-6 * (1.0 + delta))
                return {false, "diag(D) drifted from delta at case " + std::to_string(t)};
    }
    return {true, "alphabet closure, combiner norm, diag(D)=delta and psd_factor reconstruction "
                  "green on 500 randomized cases"};
}

} // namespace

int main(int argc, char** argv)
{
    const std::string cli = argc > 1 ? argv[1] : "./tools/hybeam";
    std::cout << "hybeam acceptance suite" << std::endl;

    run_criterion(1, criterion1);
    run_criterion(2, criterion2);
    run_criterion(3, criterion3);
    run_criterion(4, criterion4);
    run_criterion(5, criterion5);
    run_criterion(6, criterion6);
    run_criterion(7, criterion7);
    run_criterion(8, criterion8);
    run_criterion(9, criterion9);
    run_criterion(10, [&] { return criterion10(cli); });
    run_criterion(11, criterion11);

    if (g_failures == 0)
        std::cout << "all criteria passed" << std::endl;
    else
        std::cout << g_failures << " criteria failed" << std::endl;
    return g_failures == 0 ? 0 : 1;
}
