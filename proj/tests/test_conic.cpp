// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <catch2/catch_amalgamated.hpp>

#include "hybeam/conic/io.hpp"
#include "hybeam/conic/problem.hpp"
#include "hybeam/conic/psd.hpp"
#include "hybeam/conic/solver.hpp"
#include "hybeam/rng.hpp"

using namespace hybeam;
using namespace hybeam::conic;

namespace {

CMat random_hermitian(int n, RngStream& rng)
{
    CMat a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            a(r, c) = rng.cgaussian();
    return 0.5 * (a + a.adjoint());
}

CMat random_psd(int n, RngStream& rng, double ridge = 0.0)
{
    CMat a(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            a(r, c) = rng.cgaussian();
    return a * a.adjoint() + ridge * CMat::Identity(n, n);
}

} // namespace

TEST_CASE("dominant_rank_ratio")
{
    RngStream rng(3);
    CVec v = rng.cgaussian_vector(4);
    CHECK(dominant_rank_ratio(v * v.adjoint()) == Catch::Approx(0.0).margin(1e-12));
    CHECK(dominant_rank_ratio(CMat::Identity(2, 2)) == Catch::Approx(1.0).margin(1e-12));

    CMat d = CMat::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 1.0;
    CHECK(dominant_rank_ratio(d) == Catch::Approx(0.25).margin(1e-12));
    CHECK(dominant_rank_ratio(CMat::Ones(1, 1)) == 0.0);

    CMat bad(2, 2);
    bad << cplx(0, 0), cplx(1, 0), cplx(2, 0), cplx(0, 0);
    CHECK_THROWS_AS(dominant_rank_ratio(bad), std::invalid_argument);
}

TEST_CASE("psd_factor")
{
    SECTION("identity")
    {
        const CMat q = psd_factor(CMat::Identity(3, 3));
        CHECK((q.transpose() * q.conjugate() - CMat::Identity(3, 3)).norm() < 1e-12);
    }

    SECTION("rank-one lift produces columns proportional to a common unit vector")
    {
        RngStream rng(9);
        const CVec f = rng.cgaussian_vector(5);
        const CMat q = psd_factor(f * f.adjoint());
        // q_n = f_n * u for a shared unit vector u
        int pivot = 0;
        for (int n = 1; n < 5; ++n)
            if (std::abs(f[n]) > std::abs(f[pivot]))
                pivot = n;
        const CVec u = q.col(pivot) / f[pivot];
        CHECK(std::abs(u.norm() - 1.0) < 1e-10);
        for (int n = 0; n < 5; ++n)
            CHECK((q.col(n) - f[n] * u).norm() < 1e-7 * (1.0 + f.norm()));
    }

    SECTION("random PSD reconstruction")
    {
        RngStream rng(10);
        for (int t = 0; t < 20; ++t) {
            const CMat x = random_psd(8, rng);
            const CMat q = psd_factor(x);
            CHECK((q.transpose() * q.conjugate() - x).norm() <= 1e-10 * (1.0 + x.norm()));
        }
    }

    SECTION("deterministic")
    {
        RngStream rng(12);
        const CMat x = random_psd(6, rng);
        CHECK(psd_factor(x) == psd_factor(x));
    }

    SECTION("rejects clearly indefinite input")
    {
        CMat x = CMat::Identity(2, 2);
        x(1, 1) = -1e-4;
        CHECK_THROWS_AS(psd_factor(x), std::invalid_argument);
    }

    SECTION("clamps tiny negative eigenvalues")
    {
        CMat x = CMat::Identity(2, 2);
        x(1, 1) = -1e-12;
        CMat clamped = x;
        clamped(1, 1) = 0.0;
        const CMat q = psd_factor(x);
        CHECK((q.transpose() * q.conjugate() - clamped).norm() < 1e-10);
    }
}

TEST_CASE("solve: scalar lower bound")
{
    // min x  s.t.  x >= 3 (as -x <= -3), x in a 1x1 PSD block
    SdpProblem p;
    p.blocks = {{"x", 1}};
    p.objective_blocks = {CMat::Ones(1, 1)};
    SdpProblem::Constraint c;
    c.block_coeffs = {-CMat::Ones(1, 1)};
    c.sense = SdpProblem::Sense::LessEqual;
    c.rhs = -3.0;
    p.constraints.push_back(c);

    const SdpSolution s = solve(p, 1e-8, 100);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == Catch::Approx(3.0).margin(1e-6));
    CHECK(s.block_values[0](0, 0).real() == Catch::Approx(3.0).margin(1e-5));
}

TEST_CASE("solve: maxcut-type analytic optimum")
{
    // min Tr(CX), C = [[0,1],[1,0]], diag(X) = 1, X >= 0  ->  -2 at [[1,-1],[-1,1]]
    SdpProblem p;
    p.blocks = {{"X", 2}};
    CMat c(2, 2);
    c << 0.0, 1.0, 1.0, 0.0;
    p.objective_blocks = {c};
    for (int i = 0; i < 2; ++i) {
        SdpProblem::Constraint con;
        CMat e = CMat::Zero(2, 2);
        e(i, i) = 1.0;
        con.block_coeffs = {e};
        con.sense = SdpProblem::Sense::Equal;
        con.rhs = 1.0;
        p.constraints.push_back(con);
    }

    const SdpSolution s = solve(p, 1e-8, 100);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == Catch::Approx(-2.0).margin(1e-6));
    CHECK(s.block_values[0](0, 1).real() == Catch::Approx(-1.0).margin(1e-5));
}

TEST_CASE("solve: infeasible trace constraint")
{
    // Tr(X) = -1 with X >= 0 is infeasible
    SdpProblem p;
    p.blocks = {{"X", 2}};
    p.objective_blocks = {CMat::Identity(2, 2)};
    SdpProblem::Constraint c;
    c.block_coeffs = {CMat::Identity(2, 2)};
    c.sense = SdpProblem::Sense::Equal;
    c.rhs = -1.0;
    p.constraints.push_back(c);

    const SdpSolution s = solve(p, 1e-7, 100);
    CHECK(s.status == SolveStatus::Infeasible);
}

TEST_CASE("solve: tiny LP with scalars only")
{
    // min x s.t. x >= 1, x >= 0
    SdpProblem p;
    p.scalars = {{"x", true}};
    p.objective_scalars = RVec::Ones(1);
    SdpProblem::Constraint c;
    c.scalar_coeffs = -RVec::Ones(1);
    c.sense = SdpProblem::Sense::LessEqual;
    c.rhs = -1.0;
    p.constraints.push_back(c);

    const SdpSolution s = solve(p, 1e-8, 100);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == Catch::Approx(1.0).margin(1e-6));
    CHECK(s.scalar_values[0] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("solve: rejects non-Hermitian input")
{
    SdpProblem p;
    p.blocks = {{"X", 2}};
    CMat c(2, 2);
    c << cplx(0, 0), cplx(1, 0.5), cplx(1, 0.5), cplx(0, 0); // not Hermitian
    p.objective_blocks = {c};
    CHECK_THROWS_AS(solve(p), std::invalid_argument);
}

namespace {

// Strictly feasible random instance: draw X0, Z0 > 0, y0; set b = A(X0) and
// C = Z0 + A*(y0), so the optimum exists with zero residuals and gap.
SdpProblem random_feasible_problem(RngStream& rng, int& out_constraints)
{
    const int n_blocks = 1 + int(rng.next_u64() % 2);
    const int n_scalars = int(rng.next_u64() % 3);
    const int m = 2 + int(rng.next_u64() % 5);
    out_constraints = m;

    SdpProblem p;
    std::vector<CMat> x0;
    for (int b = 0; b < n_blocks; ++b) {
        const int dim = 2 + int(rng.next_u64() % 15); // up to 16
        p.blocks.push_back({"B" + std::to_string(b), dim});
        x0.push_back(random_psd(dim, rng, 0.5));
    }
    RVec s0(n_scalars);
    for (int j = 0; j < n_scalars; ++j) {
        p.scalars.push_back({"s" + std::to_string(j), true});
        s0[j] = rng.uniform(0.5, 2.0);
    }

    RVec y0(m);
    for (int i = 0; i < m; ++i)
        y0[i] = rng.gaussian();

    std::vector<CMat> zsum(n_blocks);
    for (int b = 0; b < n_blocks; ++b)
        zsum[b] = random_psd(p.blocks[b].dim, rng, 0.5); // Z0 strictly PD
    RVec zl(n_scalars);
    for (int j = 0; j < n_scalars; ++j)
        zl[j] = rng.uniform(0.5, 2.0);

    p.objective_scalars = zl;
    for (int i = 0; i < m; ++i) {
        SdpProblem::Constraint con;
        con.sense = SdpProblem::Sense::Equal;
        double rhs = 0.0;
        con.scalar_coeffs = RVec(n_scalars);
        for (int j = 0; j < n_scalars; ++j) {
            con.scalar_coeffs[j] = rng.gaussian();
            rhs += con.scalar_coeffs[j] * s0[j];
            p.objective_scalars[j] += y0[i] * con.scalar_coeffs[j];
        }
        for (int b = 0; b < n_blocks; ++b) {
            CMat a = random_hermitian(p.blocks[b].dim, rng);
            con.block_coeffs.push_back(a);
            rhs += (a * x0[b]).trace().real();
            zsum[b] += y0[i] * a;
        }
        con.rhs = rhs;
        p.constraints.push_back(std::move(con));
    }
    p.objective_blocks = zsum;

    // roughly half the instances get an extra slack inequality
    if (rng.next_u64() % 2 == 0) {
        SdpProblem::Constraint con;
        con.sense = SdpProblem::Sense::LessEqual;
        con.scalar_coeffs = RVec::Zero(n_scalars);
        double lhs = 0.0;
        for (int b = 0; b < n_blocks; ++b) {
            CMat a = random_hermitian(p.blocks[b].dim, rng);
            con.block_coeffs.push_back(a);
            lhs += (a * x0[b]).trace().real();
        }
        con.rhs = lhs + rng.uniform(0.5, 2.0);
        p.constraints.push_back(std::move(con));
        ++out_constraints;
    }
    return p;
}

} // namespace

TEST_CASE("solve: random strictly feasible instances converge cleanly")
{
    RngStream rng(777);
    for (int t = 0; t < 25; ++t) {
        int m = 0;
        const SdpProblem p = random_feasible_problem(rng, m);
        const SdpSolution s = solve(p, 1e-7, 100);
        INFO("instance " << t << " with " << m << " constraints, iterations " << s.iterations);
        REQUIRE(s.status == SolveStatus::Optimal);
        CHECK(s.primal_residual <= 1e-6);
        CHECK(s.dual_residual <= 1e-6);
        CHECK(s.duality_gap <= 1e-6);
        // PSD within solver tolerance
        for (const auto& x : s.block_values) {
            Eigen::SelfAdjointEigenSolver<CMat> eig(x, Eigen::EigenvaluesOnly);
            CHECK(eig.eigenvalues()[0] >= -1e-8 * (1.0 + eig.eigenvalues().cwiseAbs().maxCoeff()));
        }
        // nonnegative scalars
        if (s.scalar_values.size())
            CHECK(s.scalar_values.minCoeff() >= -1e-9);
    }
}

TEST_CASE("problem json round trip")
{
    RngStream rng(55);
    int m = 0;
    const SdpProblem p = random_feasible_problem(rng, m);
    const SdpProblem q = from_json(to_json(p));
    REQUIRE(q.num_blocks() == p.num_blocks());
    REQUIRE(q.num_constraints() == p.num_constraints());
    const SdpSolution sp = solve(p, 1e-7, 100);
    const SdpSolution sq = solve(q, 1e-7, 100);
    REQUIRE(sp.status == SolveStatus::Optimal);
    REQUIRE(sq.status == SolveStatus::Optimal);
    CHECK(sq.objective == Catch::Approx(sp.objective).epsilon(1e-9));

    dump_problem(p, "conic_roundtrip.json");
    const SdpProblem r = load_problem("conic_roundtrip.json");
    CHECK(solve(r, 1e-7, 100).objective == Catch::Approx(sp.objective).epsilon(1e-9));
}
