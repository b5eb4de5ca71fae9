// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include <catch2/catch_amalgamated.hpp>

#include "hybeam/channel.hpp"

using namespace hybeam;

TEST_CASE("array_response broadside gives equal real entries")
{
    const CVec v = array_response({4, 0.5}, 0.0);
    REQUIRE(v.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(v[i].real() == Catch::Approx(0.5).margin(1e-15));
        CHECK(v[i].imag() == Catch::Approx(0.0).margin(1e-15));
    }
}

TEST_CASE("array_response endfire two-element phase")
{
    const CVec v = array_response({2, 0.5}, 90.0);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(v[0] - cplx(s, 0.0)) < 1e-12);
    CHECK(std::abs(v[1] - s * std::polar(1.0, pi)) < 1e-12);
}

TEST_CASE("array_response is unit norm")
{
    RngStream rng(7);
    for (int t = 0; t < 200; ++t) {
        ArrayGeometry g{1 + int(rng.next_u64() % 16), rng.uniform(0.1, 1.0)};
        const CVec v = array_response(g, rng.uniform(-360.0, 360.0));
        CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    }
}

namespace {

AngleProfile small_profile(int groups, int users, int paths)
{
    AngleProfile p;
    for (int i = 0; i < groups; ++i)
        p.group_mean_aod_deg.push_back(-60.0 + 120.0 * i / std::max(1, groups - 1));
    for (int k = 0; k < users; ++k)
        p.user_mean_aoa_deg.push_back(-150.0 + 300.0 * k / std::max(1, users - 1));
    p.spread_aod_deg = 20.0;
    p.spread_aoa_deg = 45.0;
    p.num_paths = paths;
    return p;
}

} // namespace

TEST_CASE("sample_channel single path is rank one")
{
    const GroupAssignment groups = GroupAssignment::even_split(3, 1);
    RngStream rng(11);
    const ChannelSet cs = sample_channel({6, 0.5}, {2, 0.5}, small_profile(1, 3, 1), groups, rng);
    for (const auto& h : cs.h) {
        Eigen::JacobiSVD<CMat> svd(h);
        REQUIRE(svd.singularValues()[0] > 0.0);
        CHECK(svd.singularValues()[1] <= 1e-12 * svd.singularValues()[0]);
    }
}

TEST_CASE("sample_channel is deterministic in the stream")
{
    const GroupAssignment groups = GroupAssignment::even_split(4, 2);
    const AngleProfile prof = small_profile(2, 4, 5);
    RngStream a(99), b(99);
    const ChannelSet ca = sample_channel({5, 0.5}, {2, 0.5}, prof, groups, a);
    const ChannelSet cb = sample_channel({5, 0.5}, {2, 0.5}, prof, groups, b);
    for (int k = 0; k < 4; ++k)
        CHECK(ca.h[k] == cb.h[k]);
}

TEST_CASE("sample_channel Frobenius normalization (law of large numbers)")
{
    const int n_tx = 4, n_rx = 2;
    const GroupAssignment groups = GroupAssignment::even_split(1, 1);
    const AngleProfile prof = small_profile(1, 1, 8);
    RngStream rng(2024);
    double acc = 0.0;
    const int draws = 2500;
    for (int t = 0; t < draws; ++t) {
        const ChannelSet cs = sample_channel({n_tx, 0.5}, {n_rx, 0.5}, prof, groups, rng);
        acc += cs.h[0].squaredNorm();
    }
    const double mean = acc / draws;
    CHECK(mean == Catch::Approx(double(n_tx * n_rx)).epsilon(0.05));
}

TEST_CASE("sample_channel rejects mismatched dimensions")
{
    const GroupAssignment groups = GroupAssignment::even_split(4, 2);
    AngleProfile prof = small_profile(2, 3, 4); // 3 users but groups has 4
    RngStream rng(1);
    CHECK_THROWS_AS(sample_channel({4, 0.5}, {2, 0.5}, prof, groups, rng), std::invalid_argument);
}

TEST_CASE("channel_correlation basic values")
{
    RngStream rng(5);
    CMat h(2, 3);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c)
            h(r, c) = rng.cgaussian();

    CHECK(channel_correlation(h, h) == Catch::Approx(1.0).margin(1e-12));

    CMat a = CMat::Zero(1, 2), b = CMat::Zero(1, 2);
    a(0, 0) = 1.0;
    b(0, 1) = 1.0;
    CHECK(channel_correlation(a, b) == Catch::Approx(0.0).margin(1e-15));

    CHECK_THROWS_AS(channel_correlation(a, CMat::Zero(1, 2)), std::invalid_argument);
}

TEST_CASE("channel_correlation reduces to vector correlation at N_rx = 1")
{
    RngStream rng(17);
    for (int t = 0; t < 50; ++t) {
        CMat a(1, 5), b(1, 5);
        for (int c = 0; c < 5; ++c) {
            a(0, c) = rng.cgaussian();
            b(0, c) = rng.cgaussian();
        }
        const CVec va = a.row(0).adjoint(), vb = b.row(0).adjoint();
        const double expect = std::abs(cplx(va.adjoint() * vb)) / (va.norm() * vb.norm());
        CHECK(channel_correlation(a, b) == Catch::Approx(expect).margin(1e-13));
        CHECK(channel_correlation(a, b) == Catch::Approx(channel_correlation(b, a)).margin(1e-15));
        CHECK(channel_correlation(a, b) >= 0.0);
        CHECK(channel_correlation(a, b) <= 1.0);
    }
}

TEST_CASE("correlation_histogram intra/inter split")
{
    SECTION("two users in one group leave the inter histogram empty")
    {
        GroupAssignment groups = GroupAssignment::even_split(2, 1);
        ChannelSet cs;
        RngStream rng(3);
        cs.h.resize(2, CMat(2, 4));
        for (auto& h : cs.h)
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 4; ++c)
                    h(r, c) = rng.cgaussian();
        const auto hist = correlation_histogram(cs, groups, 20);
        CHECK(hist.inter_count == 0);
        CHECK(hist.inter_prob.cwiseAbs().sum() == 0.0);
        CHECK(hist.intra_count == 1);
        CHECK(hist.intra_prob.sum() == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("identical channels concentrate intra mass in the top bin")
    {
        GroupAssignment groups = GroupAssignment::even_split(3, 1);
        ChannelSet cs;
        CMat h(1, 3);
        h << cplx(1, 1), cplx(0, 2), cplx(-1, 0);
        cs.h = {h, h, h};
        const auto hist = correlation_histogram(cs, groups, 10);
        CHECK(hist.intra_prob[9] == Catch::Approx(1.0).margin(1e-12));
        CHECK(hist.intra_mean == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("needs two users")
    {
        ChannelSet cs;
        cs.h = {CMat::Ones(1, 2)};
        CHECK_THROWS_AS(correlation_histogram(cs, GroupAssignment::even_split(1, 1), 10),
                        std::invalid_argument);
    }
}
