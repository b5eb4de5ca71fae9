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
#include <string>
#include <vector>

#include "hybeam/channel.hpp"
#include "hybeam/conic/problem.hpp"
#include "hybeam/conic/psd.hpp"
#include "hybeam/precoding.hpp"
#include "hybeam/rng.hpp"

namespace hybeam {

// ---------------------------------------------------------------------------
// Lifted variables of the three relaxations
// ---------------------------------------------------------------------------

/// Lift D = f f^H of the vectorized analog precoder, plus the QoS slacks.
struct LiftedAnalog {
    CMat d; // (N_RF N_tx) x (N_RF N_tx), diag(D) = delta at solver tolerance
    RVec slacks;
};

/// Lifts M_i = m_i m_i^H of the digital precoders, plus the QoS slacks.
struct LiftedDigital {
    std::vector<CMat> m; // G blocks of dim N_RF
    RVec slacks;
};

/// Lift W_k = w_k w_k^H of one user's combiner, with its slack.
struct LiftedCombiner {
    CMat w; // N_rx x N_rx, Tr(W) = P_rx at solver tolerance
    double slack = 0.0;
};

inline LiftedAnalog extract_lifted_analog(const conic::SdpSolution& sol)
{
    return {sol.block_values.at(0), sol.scalar_values};
}

inline LiftedDigital extract_lifted_digital(const conic::SdpSolution& sol)
{
    return {sol.block_values, sol.scalar_values};
}

inline LiftedCombiner extract_lifted_combiner(const conic::SdpSolution& sol)
{
    return {sol.block_values.at(0), sol.scalar_values[0]};
}

// ---------------------------------------------------------------------------
// QoS slack helpers (shared by the builders, the bound checks and the tests)
// ---------------------------------------------------------------------------

/// Slack needed for user k's QoS inequality to hold at the given point:
///   max(0, gamma_i (interference + sigma2 ||w||^2) - desired).
inline double qos_deficit(const CMat& h_k,
                          const CMat& f,
                          const DigitalPrecoderSet& precoders,
                          const CVec& w_k,
                          int group_index,
                          const QosTargets& targets)
{
    const Eigen::RowVectorXcd e = w_k.adjoint() * h_k * f;
    double desired = 0.0, interference = 0.0;
    for (Eigen::Index j = 0; j < precoders.cols(); ++j) {
        const double p = std::norm(cplx(e * precoders.col(j)));
        if (j == group_index)
            desired = p;
        else
            interference += p;
    }
    const double gamma = targets.gamma_linear[group_index];
    return std::max(0.0, gamma * (interference + targets.sigma2_mw * w_k.squaredNorm()) - desired);
}

inline RVec qos_deficits(const ChannelSet& channels,
                         const CMat& f,
                         const DigitalPrecoderSet& precoders,
                         const CombinerSet& combiners,
                         const QosTargets& targets,
                         const GroupAssignment& groups)
{
    RVec d(groups.num_users());
    for (int k = 0; k < groups.num_users(); ++k)
        d[k] = qos_deficit(channels.h[k], f, precoders, combiners.col(k), groups.group_of(k), targets);
    return d;
}

/// Penalized objective sum_i ||F m_i||^2 + beta sum_k x_k of a rank-one point
/// with minimal feasible slacks. Any such point lifts to a feasible point of
/// the P1/P2 relaxations, so the SDR optimum is a lower bound on this value.
inline double penalized_power_objective(const ChannelSet& channels,
                                        const CMat& f,
                                        const DigitalPrecoderSet& precoders,
                                        const CombinerSet& combiners,
                                        const QosTargets& targets,
                                        const GroupAssignment& groups,
                                        double beta)
{
    return total_tx_power(f, precoders) +
           beta * qos_deficits(channels, f, precoders, combiners, targets, groups).sum();
}

// ---------------------------------------------------------------------------
// Problem builders
// ---------------------------------------------------------------------------

namespace detail_sdr {

inline void check_dims(const ChannelSet& channels, const GroupAssignment& groups,
                       const QosTargets& targets, Eigen::Index n_rf_precoder,
                       const CombinerSet* combiners)
{
    channels.validate();
    targets.validate(groups.num_groups());
    if (channels.num_users() != groups.num_users())
        throw std::invalid_argument("sdr: channel count does not match user count");
    (void)n_rf_precoder;
    if (combiners && (combiners->cols() != channels.num_users() || combiners->rows() != channels.n_rx()))
        throw std::invalid_argument("sdr: combiner dimensions do not match channels");
}

} // namespace detail_sdr

/// P1 relaxation: optimize the lifted analog precoder D for fixed digital
/// precoders and combiners.
///
///   min  Tr(D sum_i R_i) + beta sum_k x_k
///   s.t. Tr(D (gamma_i sum_{j != i} V_jk - V_ik)) + sigma2 gamma_i ||w_k||^2 <= x_k
///        diag(D) = delta,  D >= 0,  x_k >= 0
///
/// with R_i = (conj(m_i) m_i^T) kron I and V_ik = a_ik a_ik^H,
/// a_ik = conj(m_i) kron (H_k^H w_k); f = vec(F) is stacked column-major.
inline conic::SdpProblem build_p1(const ChannelSet& channels,
                                  const DigitalPrecoderSet& precoders,
                                  const CombinerSet& combiners,
                                  const QosTargets& targets,
                                  const GroupAssignment& groups,
                                  double beta,
                                  double delta)
{
    detail_sdr::check_dims(channels, groups, targets, precoders.rows(), &combiners);
    if (precoders.cols() != groups.num_groups())
        throw std::invalid_argument("build_p1: precoder count does not match groups");

    const int n_tx = channels.n_tx();
    const int n_rf = int(precoders.rows());
    const int n = n_rf * n_tx;
    const int k_users = groups.num_users();
    const int n_groups = groups.num_groups();

    conic::SdpProblem p;
    p.blocks = {{"D", n}};
    for (int k = 0; k < k_users; ++k)
        p.scalars.push_back({"x" + std::to_string(k), true});

    // objective: sum_i R_i has Kronecker structure (conj(m_i) m_i^T) kron I
    CMat mm = CMat::Zero(n_rf, n_rf);
    for (int i = 0; i < n_groups; ++i)
        mm += precoders.col(i).conjugate() * precoders.col(i).transpose();
    CMat r_sum = CMat::Zero(n, n);
    for (int a = 0; a < n_rf; ++a)
        for (int b = 0; b < n_rf; ++b)
            r_sum.block(a * n_tx, b * n_tx, n_tx, n_tx) = mm(a, b) * CMat::Identity(n_tx, n_tx);
    p.objective_blocks = {r_sum};
    p.objective_scalars = RVec::Constant(k_users, beta);

    // QoS rows
    for (int k = 0; k < k_users; ++k) {
        const int gi = groups.group_of(k);
        const double gamma = targets.gamma_linear[gi];
        const CVec ht = channels.h[k].adjoint() * combiners.col(k); // N_tx
        std::vector<CVec> a(n_groups);
        for (int j = 0; j < n_groups; ++j) {
            a[j].resize(n);
            for (int r = 0; r < n_rf; ++r)
                a[j].segment(r * n_tx, n_tx) = std::conj(precoders(r, j)) * ht;
        }
        CMat coeff = CMat::Zero(n, n);
        for (int j = 0; j < n_groups; ++j) {
            if (j == gi)
                coeff.noalias() -= a[j] * a[j].adjoint();
            else
                coeff.noalias() += gamma * (a[j] * a[j].adjoint());
        }
        conic::SdpProblem::Constraint con;
        con.block_coeffs = {0.5 * (coeff + coeff.adjoint())};
        con.scalar_coeffs = RVec::Zero(k_users);
        con.scalar_coeffs[k] = -1.0;
        con.sense = conic::SdpProblem::Sense::LessEqual;
        con.rhs = -targets.sigma2_mw * gamma * combiners.col(k).squaredNorm();
        p.constraints.push_back(std::move(con));
    }

    // fixed diagonal
    for (int d = 0; d < n; ++d) {
        conic::SdpProblem::Constraint con;
        CMat e = CMat::Zero(n, n);
        e(d, d) = 1.0;
        con.block_coeffs = {std::move(e)};
        con.scalar_coeffs = RVec::Zero(k_users);
        con.sense = conic::SdpProblem::Sense::Equal;
        con.rhs = delta;
        p.constraints.push_back(std::move(con));
    }
    return p;
}

/// Rank-one recovery of the analog precoder from a solved lift: factor
/// D = Q^T Q^*, project z_n = q_n^H u entrywise onto the nearest alphabet
/// phase (the maximize-Re form of the per-entry least-squares problem), and
/// reshape column-major into F.
inline AnalogPrecoder recover_analog(const CMat& d_hat,
                                     const PhaseAlphabet& alphabet,
                                     const CVec& u,
                                     int n_tx,
                                     int n_rf)
{
    if (d_hat.rows() != Eigen::Index(n_tx) * n_rf)
        throw std::invalid_argument("recover_analog: lift dimension is not N_RF * N_tx");
    if (std::abs(u.squaredNorm() - 1.0) > 1e-9)
        throw std::invalid_argument("recover_analog: u must be a unit vector");

    const CMat q = conic::psd_factor(d_hat);
    AnalogPrecoder f;
    f.alphabet = alphabet;
    f.index.resize(n_tx, n_rf);
    for (int n = 0; n < n_tx * n_rf; ++n) {
        const cplx z = cplx(q.col(n).adjoint() * u);
        const int idx = (z == cplx(0.0, 0.0)) ? 0 : alphabet.nearest_index(std::arg(std::conj(z)));
        f.index(n % n_tx, n / n_tx) = idx;
    }
    return f;
}

/// P2 relaxation: optimize the lifted digital precoders M_i for fixed F and
/// combiners.
///
///   min  sum_i Tr(Y M_i) + beta sum_k x_k
///   s.t. Tr(X_k (gamma_i sum_{j != i} M_j - M_i)) + sigma2 gamma_i ||w_k||^2 <= x_k
///        M_i >= 0,  x_k >= 0
///
/// with Y = F^H F and X_k = g_k g_k^H, g_k = F^H H_k^H w_k.
inline conic::SdpProblem build_p2(const ChannelSet& channels,
                                  const CMat& f,
                                  const CombinerSet& combiners,
                                  const QosTargets& targets,
                                  const GroupAssignment& groups,
                                  double beta)
{
    detail_sdr::check_dims(channels, groups, targets, f.cols(), &combiners);
    if (f.rows() != channels.n_tx())
        throw std::invalid_argument("build_p2: analog precoder rows must equal N_tx");

    const int n_rf = int(f.cols());
    const int k_users = groups.num_users();
    const int n_groups = groups.num_groups();

    conic::SdpProblem p;
    const CMat y = f.adjoint() * f;
    for (int i = 0; i < n_groups; ++i) {
        p.blocks.push_back({"M" + std::to_string(i), n_rf});
        p.objective_blocks.push_back(y);
    }
    for (int k = 0; k < k_users; ++k)
        p.scalars.push_back({"x" + std::to_string(k), true});
    p.objective_scalars = RVec::Constant(k_users, beta);

    for (int k = 0; k < k_users; ++k) {
        const int gi = groups.group_of(k);
        const double gamma = targets.gamma_linear[gi];
        const CVec g = f.adjoint() * channels.h[k].adjoint() * combiners.col(k); // N_RF
        const CMat xk = g * g.adjoint();
        conic::SdpProblem::Constraint con;
        con.block_coeffs.resize(n_groups);
        for (int j = 0; j < n_groups; ++j)
            con.block_coeffs[j] = (j == gi) ? CMat(-xk) : CMat(gamma * xk);
        con.scalar_coeffs = RVec::Zero(k_users);
        con.scalar_coeffs[k] = -1.0;
        con.sense = conic::SdpProblem::Sense::LessEqual;
        con.rhs = -targets.sigma2_mw * gamma * combiners.col(k).squaredNorm();
        p.constraints.push_back(std::move(con));
    }
    return p;
}

/// Gaussian randomization m_i ~ CN(0, M_i), realized as A_i^H g with
/// A_i^H A_i = M_i from the same eigenvalue square root as psd_factor.
inline DigitalPrecoderSet randomize_digital(const std::vector<CMat>& m_lifts, RngStream& rng)
{
    if (m_lifts.empty())
        throw std::invalid_argument("randomize_digital: no lifted precoders");
    const int n_rf = int(m_lifts.front().rows());
    DigitalPrecoderSet out(n_rf, int(m_lifts.size()));
    for (int i = 0; i < int(m_lifts.size()); ++i) {
        const CMat a = conic::hermitian_sqrt_factor(m_lifts[i]);
        out.col(i) = a.adjoint() * rng.cgaussian_vector(n_rf);
    }
    return out;
}

/// P3 relaxations, one independent problem per user k:
///
///   min  x_k
///   s.t. Tr(W_k (gamma_i sum_{j != i} Z_kj - Z_ki)) + sigma2 gamma_i Tr(W_k) <= x_k
///        Tr(W_k) = P_rx,  W_k >= 0,  x_k >= 0
///
/// with Z_ki = (H_k F m_i)(H_k F m_i)^H.
inline std::vector<conic::SdpProblem> build_p3(const ChannelSet& channels,
                                               const CMat& f,
                                               const DigitalPrecoderSet& precoders,
                                               const QosTargets& targets,
                                               const GroupAssignment& groups)
{
    detail_sdr::check_dims(channels, groups, targets, f.cols(), nullptr);
    if (f.rows() != channels.n_tx() || f.cols() != precoders.rows())
        throw std::invalid_argument("build_p3: F does not match channels/precoders");
    if (precoders.cols() != groups.num_groups())
        throw std::invalid_argument("build_p3: precoder count does not match groups");

    const int n_rx = channels.n_rx();
    const int n_groups = groups.num_groups();
    std::vector<conic::SdpProblem> out;
    out.reserve(groups.num_users());

    for (int k = 0; k < groups.num_users(); ++k) {
        const int gi = groups.group_of(k);
        const double gamma = targets.gamma_linear[gi];
        CMat coeff = targets.sigma2_mw * gamma * CMat::Identity(n_rx, n_rx);
        for (int j = 0; j < n_groups; ++j) {
            const CVec z = channels.h[k] * (f * precoders.col(j)); // N_rx
            if (j == gi)
                coeff.noalias() -= z * z.adjoint();
            else
                coeff.noalias() += gamma * (z * z.adjoint());
        }

        conic::SdpProblem p;
        p.blocks = {{"W" + std::to_string(k), n_rx}};
        p.scalars = {{"x" + std::to_string(k), true}};
        p.objective_blocks = {CMat()};
        p.objective_scalars = RVec::Ones(1);

        conic::SdpProblem::Constraint qos;
        qos.block_coeffs = {0.5 * (coeff + coeff.adjoint())};
        qos.scalar_coeffs = -RVec::Ones(1);
        qos.sense = conic::SdpProblem::Sense::LessEqual;
        qos.rhs = 0.0;
        p.constraints.push_back(std::move(qos));

        conic::SdpProblem::Constraint trace;
        trace.block_coeffs = {CMat::Identity(n_rx, n_rx)};
        trace.scalar_coeffs = RVec::Zero(1);
        trace.sense = conic::SdpProblem::Sense::Equal;
        trace.rhs = targets.prx_max_mw;
        p.constraints.push_back(std::move(trace));

        out.push_back(std::move(p));
    }
    return out;
}

/// Standard complex Gaussian direction, normalized to the unit sphere.
inline CVec sample_unit_sphere(int dimension, RngStream& rng)
{
    if (dimension < 1)
        throw std::invalid_argument("sample_unit_sphere: dimension must be >= 1");
    for (;;) {
        const CVec g = rng.cgaussian_vector(dimension);
        const double n = g.norm();
        if (n > 0.0)
            return g / n;
    }
}

/// Sphere randomization w = W v with v uniform on the unit sphere, rescaled
/// so that ||w||^2 = P_rx exactly (the raw product generally violates the
/// receive power constraint; only the direction matters for the SINR).
inline CVec randomize_combiner(const CMat& w_lift, RngStream& rng, double prx_max_mw)
{
    if (!(prx_max_mw > 0.0))
        throw std::invalid_argument("randomize_combiner: P_rx must be > 0");
    for (int attempt = 0; attempt < 16; ++attempt) {
        const CVec v = sample_unit_sphere(int(w_lift.rows()), rng);
        CVec w = w_lift * v;
        const double n = w.norm();
        if (n > 0.0)
            return w * (std::sqrt(prx_max_mw) / n);
    }
    throw std::runtime_error("randomize_combiner: 16 consecutive zero draws (W is zero?)");
}

} // namespace hybeam
