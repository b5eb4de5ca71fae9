// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hybeam/channel.hpp"
#include "hybeam/common.hpp"
#include "hybeam/groups.hpp"

namespace hybeam {

/// dBm <-> linear milliwatt conversions.
inline double dbm_to_linear(double x_dbm) { return std::pow(10.0, x_dbm / 10.0); }

inline double linear_to_dbm(double x_mw)
{
    if (!(x_mw > 0.0))
        throw std::invalid_argument("linear_to_dbm: input must be > 0 mW");
    return 10.0 * std::log10(x_mw);
}

/// The L equally spaced constant-modulus phase-shifter values
/// { m e^{j 2 pi l / L} : l = 0..L-1 } with modulus m = sqrt(delta).
class PhaseAlphabet {
public:
    PhaseAlphabet() = default;
    PhaseAlphabet(int num_levels, double modulus) : num_levels_(num_levels), modulus_(modulus)
    {
        if (num_levels_ < 1)
            throw std::invalid_argument("PhaseAlphabet: num_levels must be >= 1");
        if (!(modulus_ > 0.0))
            throw std::invalid_argument("PhaseAlphabet: modulus must be > 0");
    }

    int num_levels() const { return num_levels_; }
    double modulus() const { return modulus_; }
    double phase(int l) const { return 2.0 * pi * double(l) / double(num_levels_); }
    cplx element(int l) const { return std::polar(modulus_, phase(l)); }

    /// Index whose phase is circularly closest to `target` (radians).
    /// Exhaustive scan; exact ties go to the lowest index.
    int nearest_index(double target) const
    {
        int best = 0;
        double best_dist = circular_distance(phase(0), target);
        for (int l = 1; l < num_levels_; ++l) {
            const double d = circular_distance(phase(l), target);
            if (d < best_dist) {
                best_dist = d;
                best = l;
            }
        }
        return best;
    }

    /// Nearest alphabet index to a complex value's phase; z = 0 maps to index 0.
    int quantize(cplx z) const
    {
        if (z == cplx(0.0, 0.0))
            return 0;
        return nearest_index(std::arg(z));
    }

    static double circular_distance(double a, double b)
    {
        double d = std::fmod(std::abs(a - b), 2.0 * pi);
        return d > pi ? 2.0 * pi - d : d;
    }

private:
    int num_levels_ = 1;
    double modulus_ = 1.0;
};

/// Analog precoder stored as alphabet indices; the realized complex matrix is
/// derived on demand. Every realized entry is an alphabet element, so
/// ||F||_F^2 = N_tx N_RF delta holds by construction.
struct AnalogPrecoder {
    Eigen::MatrixXi index; // N_tx x N_RF, values in [0, L)
    PhaseAlphabet alphabet;

    int n_tx() const { return int(index.rows()); }
    int n_rf() const { return int(index.cols()); }

    void validate() const
    {
        for (Eigen::Index r = 0; r < index.rows(); ++r)
            for (Eigen::Index c = 0; c < index.cols(); ++c)
                if (index(r, c) < 0 || index(r, c) >= alphabet.num_levels())
                    throw std::invalid_argument("AnalogPrecoder: index outside alphabet");
    }

    CMat realized() const
    {
        CMat f(index.rows(), index.cols());
        for (Eigen::Index r = 0; r < index.rows(); ++r)
            for (Eigen::Index c = 0; c < index.cols(); ++c)
                f(r, c) = alphabet.element(index(r, c));
        return f;
    }
};

/// Digital precoders: one column m_i per multicast group (N_RF x G).
using DigitalPrecoderSet = CMat;

/// Receive combiners: one column w_k per user (N_rx x K), each with
/// ||w_k||^2 = P_rx^max.
using CombinerSet = CMat;

/// Per-group SINR targets (linear), noise power and receive power budget (mW).
struct QosTargets {
    RVec gamma_linear; // one entry per group
    double sigma2_mw = 1.0;
    double prx_max_mw = 1.0;

    static QosTargets from_db(const RVec& gamma_db, double sigma2_dbm, double prx_dbm)
    {
        QosTargets t;
        t.gamma_linear = gamma_db.unaryExpr([](double g) { return dbm_to_linear(g); });
        t.sigma2_mw = dbm_to_linear(sigma2_dbm);
        t.prx_max_mw = dbm_to_linear(prx_dbm);
        return t;
    }

    void validate(int num_groups) const
    {
        if (int(gamma_linear.size()) != num_groups)
            throw std::invalid_argument("QosTargets: gamma length must equal G");
        if ((gamma_linear.array() <= 0.0).any())
            throw std::invalid_argument("QosTargets: gamma must be > 0");
        if (!(sigma2_mw > 0.0) || !(prx_max_mw > 0.0))
            throw std::invalid_argument("QosTargets: sigma2 and P_rx must be > 0");
    }
};

inline void validate_combiners(const CombinerSet& w, double prx_max_mw, double rel_tol = 1e-9)
{
    for (Eigen::Index k = 0; k < w.cols(); ++k) {
        const double p = w.col(k).squaredNorm();
        if (std::abs(p - prx_max_mw) > rel_tol * std::max(1.0, prx_max_mw))
            throw std::invalid_argument("CombinerSet: ||w_k||^2 must equal P_rx^max");
    }
}

/// SINR of user k (in group `group_index`) at combiner output:
///   |w^H H F m_i|^2 / (sum_{j != i} |w^H H F m_j|^2 + sigma2 ||w||^2).
inline double sinr(const CMat& h_k,
                   const CMat& f,
                   const DigitalPrecoderSet& precoders,
                   const CVec& w_k,
                   int group_index,
                   double sigma2_mw)
{
    if (h_k.cols() != f.rows() || f.cols() != precoders.rows() || h_k.rows() != w_k.size())
        throw std::invalid_argument("sinr: dimension mismatch");
    if (group_index < 0 || group_index >= precoders.cols())
        throw std::invalid_argument("sinr: group index out of range");

    const Eigen::RowVectorXcd e = w_k.adjoint() * h_k * f; // 1 x N_RF
    double desired = 0.0, interference = 0.0;
    for (Eigen::Index j = 0; j < precoders.cols(); ++j) {
        const double p = std::norm(cplx(e * precoders.col(j)));
        if (j == group_index)
            desired = p;
        else
            interference += p;
    }
    const double denom = interference + sigma2_mw * w_k.squaredNorm();
    if (denom == 0.0)
        throw std::invalid_argument("sinr: zero denominator (combiner is zero)");
    return desired / denom;
}

/// Total transmit power sum_i ||F m_i||^2 in linear mW.
inline double total_tx_power(const CMat& f, const DigitalPrecoderSet& precoders)
{
    if (f.cols() != precoders.rows())
        throw std::invalid_argument("total_tx_power: dimension mismatch");
    return (f * precoders).squaredNorm();
}

struct SatisfiedCount {
    int count = 0;
    std::vector<bool> mask;
};

/// Counts users whose true SINR (no slack) meets the inclusive group target.
inline SatisfiedCount count_satisfied(const ChannelSet& channels,
                                      const CMat& f,
                                      const DigitalPrecoderSet& precoders,
                                      const CombinerSet& combiners,
                                      const QosTargets& targets,
                                      const GroupAssignment& groups)
{
    targets.validate(groups.num_groups());
    validate_combiners(combiners, targets.prx_max_mw);

    SatisfiedCount out;
    out.mask.resize(groups.num_users(), false);
    for (int k = 0; k < groups.num_users(); ++k) {
        const int gi = groups.group_of(k);
        const double s = sinr(channels.h[k], f, precoders, combiners.col(k), gi, targets.sigma2_mw);
        if (s >= targets.gamma_linear[gi]) {
            out.mask[k] = true;
            ++out.count;
        }
    }
    return out;
}

struct BeamPattern {
    RVec angle_deg;
    RVec magnitude;
};

/// Transmit pattern |a_tx(theta)^H F m_i| over an angle grid.
inline BeamPattern tx_beam_pattern(const CMat& f,
                                   const CVec& m_i,
                                   const ArrayGeometry& geometry_tx,
                                   const RVec& angle_grid_deg)
{
    if (angle_grid_deg.size() == 0)
        throw std::invalid_argument("tx_beam_pattern: empty angle grid");
    const CVec beam = f * m_i;
    BeamPattern p;
    p.angle_deg = angle_grid_deg;
    p.magnitude.resize(angle_grid_deg.size());
    for (Eigen::Index i = 0; i < angle_grid_deg.size(); ++i)
        p.magnitude[i] = std::abs(cplx(array_response(geometry_tx, angle_grid_deg[i]).adjoint() * beam));
    return p;
}

/// Receive pattern |w_k^H a_rx(theta)| over an angle grid.
inline BeamPattern rx_beam_pattern(const CVec& w_k,
                                   const ArrayGeometry& geometry_rx,
                                   const RVec& angle_grid_deg)
{
    if (angle_grid_deg.size() == 0)
        throw std::invalid_argument("rx_beam_pattern: empty angle grid");
    BeamPattern p;
    p.angle_deg = angle_grid_deg;
    p.magnitude.resize(angle_grid_deg.size());
    for (Eigen::Index i = 0; i < angle_grid_deg.size(); ++i)
        p.magnitude[i] = std::abs(cplx(w_k.adjoint() * array_response(geometry_rx, angle_grid_deg[i])));
    return p;
}

} // namespace hybeam
