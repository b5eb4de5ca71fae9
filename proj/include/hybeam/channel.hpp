// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <stdexcept>
#include <vector>

#include "hybeam/common.hpp"
#include "hybeam/groups.hpp"
#include "hybeam/rng.hpp"

namespace hybeam {

/// Uniform linear array. The paper-style geometric model only needs the
/// element count and the element spacing in wavelengths.
struct ArrayGeometry {
    int num_elements = 1;
    double element_spacing = 0.5; // fraction of the carrier wavelength

    void validate() const
    {
        if (num_elements < 1)
            throw std::invalid_argument("ArrayGeometry: num_elements must be >= 1");
        if (!(element_spacing > 0.0))
            throw std::invalid_argument("ArrayGeometry: element_spacing must be > 0");
    }
};

/// Clustered angle description: one mean departure angle per group, one mean
/// arrival angle per user, plus the shared spreads and path count.
struct AngleProfile {
    std::vector<double> group_mean_aod_deg;
    std::vector<double> user_mean_aoa_deg;
    double spread_aod_deg = 0.0;
    double spread_aoa_deg = 0.0;
    int num_paths = 1;

    void validate(int num_groups, int num_users) const
    {
        if (int(group_mean_aod_deg.size()) != num_groups)
            throw std::invalid_argument("AngleProfile: group_mean_aod_deg length must equal G");
        if (int(user_mean_aoa_deg.size()) != num_users)
            throw std::invalid_argument("AngleProfile: user_mean_aoa_deg length must equal K");
        if (spread_aod_deg < 0.0 || spread_aoa_deg < 0.0)
            throw std::invalid_argument("AngleProfile: angular spreads must be >= 0");
        if (num_paths < 1)
            throw std::invalid_argument("AngleProfile: num_paths must be >= 1");
    }
};

/// Per-user channel matrices H_k, all of shape N_rx x N_tx.
struct ChannelSet {
    std::vector<CMat> h;

    int num_users() const { return int(h.size()); }
    int n_rx() const { return h.empty() ? 0 : int(h.front().rows()); }
    int n_tx() const { return h.empty() ? 0 : int(h.front().cols()); }

    void validate() const
    {
        for (const auto& m : h) {
            if (m.rows() != h.front().rows() || m.cols() != h.front().cols())
                throw std::invalid_argument("ChannelSet: all channel matrices must share one shape");
            if (!m.allFinite())
                throw std::invalid_argument("ChannelSet: non-finite channel entry");
        }
    }
};

/// Unit-norm ULA steering vector, entry n = exp(j 2 pi d (n-1) sin(theta)) / sqrt(N).
inline CVec array_response(const ArrayGeometry& geometry, double angle_deg)
{
    geometry.validate();
    const int n = geometry.num_elements;
    const double k = 2.0 * pi * geometry.element_spacing * std::sin(deg2rad(angle_deg));
    CVec v(n);
    const double scale = 1.0 / std::sqrt(double(n));
    for (int i = 0; i < n; ++i)
        v[i] = std::polar(scale, k * double(i));
    return v;
}

/// Geometric clustered channel: user k in group i gets
///   H_k = sqrt(N_tx N_rx / M_p) sum_l alpha_l a_rx(aoa_l) a_tx(aod_l)^H
/// with alpha_l ~ CN(0,1), aod_l uniform in group mean +- spread_aod, and
/// aoa_l uniform in user mean +- spread_aoa (angles taken modulo 360).
/// Deterministic given the rng stream: draws are ordered per user, per path,
/// as (aod, aoa, alpha).
inline ChannelSet sample_channel(const ArrayGeometry& geometry_tx,
                                 const ArrayGeometry& geometry_rx,
                                 const AngleProfile& profile,
                                 const GroupAssignment& groups,
                                 RngStream& rng)
{
    geometry_tx.validate();
    geometry_rx.validate();
    profile.validate(groups.num_groups(), groups.num_users());

    const int n_tx = geometry_tx.num_elements;
    const int n_rx = geometry_rx.num_elements;
    const int mp = profile.num_paths;
    const double scale = std::sqrt(double(n_tx) * double(n_rx) / double(mp));

    ChannelSet out;
    out.h.resize(groups.num_users());
    for (int k = 0; k < groups.num_users(); ++k) {
        const int gi = groups.group_of(k);
        const double mean_aod = profile.group_mean_aod_deg[gi];
        const double mean_aoa = profile.user_mean_aoa_deg[k];
        CMat hk = CMat::Zero(n_rx, n_tx);
        for (int l = 0; l < mp; ++l) {
            const double aod = wrap_deg(rng.uniform(mean_aod - profile.spread_aod_deg,
                                                    mean_aod + profile.spread_aod_deg));
            const double aoa = wrap_deg(rng.uniform(mean_aoa - profile.spread_aoa_deg,
                                                    mean_aoa + profile.spread_aoa_deg));
            const cplx alpha = rng.cgaussian();
            hk.noalias() += alpha * (array_response(geometry_rx, aoa) *
                                     array_response(geometry_tx, aod).adjoint());
        }
        out.h[k] = scale * hk;
    }
    return out;
}

/// Normalized Frobenius inner product |<Ha, Hb>_F| / (||Ha||_F ||Hb||_F).
/// At N_rx = 1 this reduces to the usual vector correlation.
inline double channel_correlation(const CMat& h_a, const CMat& h_b)
{
    if (h_a.rows() != h_b.rows() || h_a.cols() != h_b.cols())
        throw std::invalid_argument("channel_correlation: shape mismatch");
    const double na = h_a.norm();
    const double nb = h_b.norm();
    if (na == 0.0 || nb == 0.0)
        throw std::invalid_argument("channel_correlation: zero-norm channel");
    const cplx ip = (h_a.adjoint() * h_b).trace();
    double c = std::abs(ip) / (na * nb);
    return c > 1.0 ? 1.0 : c; // guards rounding just above 1
}

/// Binned intra-/inter-cluster correlation distributions over [0, 1].
struct CorrelationHistogram {
    RVec bin_low;
    RVec bin_high;
    RVec intra_prob; // normalized to sum 1 when any intra pair exists
    RVec inter_prob;
    double intra_mean = 0.0;
    double inter_mean = 0.0;
    long intra_count = 0;
    long inter_count = 0;
};

inline CorrelationHistogram correlation_histogram(const ChannelSet& channels,
                                                  const GroupAssignment& groups,
                                                  int num_bins = 50)
{
    if (channels.num_users() < 2)
        throw std::invalid_argument("correlation_histogram: need at least 2 users");
    if (num_bins < 1)
        throw std::invalid_argument("correlation_histogram: need at least 1 bin");

    CorrelationHistogram hist;
    hist.bin_low.resize(num_bins);
    hist.bin_high.resize(num_bins);
    hist.intra_prob = RVec::Zero(num_bins);
    hist.inter_prob = RVec::Zero(num_bins);
    for (int b = 0; b < num_bins; ++b) {
        hist.bin_low[b] = double(b) / num_bins;
        hist.bin_high[b] = double(b + 1) / num_bins;
    }

    double intra_sum = 0.0, inter_sum = 0.0;
    const int k = channels.num_users();
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            const double c = channel_correlation(channels.h[a], channels.h[b]);
            int bin = int(c * num_bins);
            if (bin >= num_bins)
                bin = num_bins - 1; // c == 1 lands in the top bin
            if (groups.group_of(a) == groups.group_of(b)) {
                hist.intra_prob[bin] += 1.0;
                intra_sum += c;
                ++hist.intra_count;
            } else {
                hist.inter_prob[bin] += 1.0;
                inter_sum += c;
                ++hist.inter_count;
            }
        }
    }
    if (hist.intra_count > 0) {
        hist.intra_prob /= double(hist.intra_count);
        hist.intra_mean = intra_sum / double(hist.intra_count);
    }
    if (hist.inter_count > 0) {
        hist.inter_prob /= double(hist.inter_count);
        hist.inter_mean = inter_sum / double(hist.inter_count);
    }
    return hist;
}

/// Accumulates pair correlations across several realizations into one
/// histogram (used by the correlation experiment).
class CorrelationAccumulator {
public:
    explicit CorrelationAccumulator(int num_bins = 50) : num_bins_(num_bins)
    {
        intra_counts_ = RVec::Zero(num_bins);
        inter_counts_ = RVec::Zero(num_bins);
    }

    void add(const ChannelSet& channels, const GroupAssignment& groups)
    {
        const int k = channels.num_users();
        for (int a = 0; a < k; ++a) {
            for (int b = a + 1; b < k; ++b) {
                const double c = channel_correlation(channels.h[a], channels.h[b]);
                int bin = int(c * num_bins_);
                if (bin >= num_bins_)
                    bin = num_bins_ - 1;
                if (groups.group_of(a) == groups.group_of(b)) {
                    intra_counts_[bin] += 1.0;
                    intra_sum_ += c;
                    ++intra_n_;
                } else {
                    inter_counts_[bin] += 1.0;
                    inter_sum_ += c;
                    ++inter_n_;
                }
            }
        }
    }

    CorrelationHistogram finish() const
    {
        CorrelationHistogram hist;
        hist.bin_low.resize(num_bins_);
        hist.bin_high.resize(num_bins_);
        for (int b = 0; b < num_bins_; ++b) {
            hist.bin_low[b] = double(b) / num_bins_;
            hist.bin_high[b] = double(b + 1) / num_bins_;
        }
        hist.intra_prob = intra_n_ > 0 ? RVec(intra_counts_ / double(intra_n_)) : RVec(RVec::Zero(num_bins_));
        hist.inter_prob = inter_n_ > 0 ? RVec(inter_counts_ / double(inter_n_)) : RVec(RVec::Zero(num_bins_));
        hist.intra_mean = intra_n_ > 0 ? intra_sum_ / double(intra_n_) : 0.0;
        hist.inter_mean = inter_n_ > 0 ? inter_sum_ / double(inter_n_) : 0.0;
        hist.intra_count = intra_n_;
        hist.inter_count = inter_n_;
        return hist;
    }

private:
    int num_bins_;
    RVec intra_counts_, inter_counts_;
    double intra_sum_ = 0.0, inter_sum_ = 0.0;
    long intra_n_ = 0, inter_n_ = 0;
};

} // namespace hybeam
