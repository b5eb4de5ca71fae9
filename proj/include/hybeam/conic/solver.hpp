// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hybeam/conic/problem.hpp"

namespace hybeam::conic {

namespace detail {

// Internal equality standard form:
//   min sum_b <C_b, X_b> + c^T u   s.t.  sum_b <A_ib, X_b> + a_i^T u = b_i,
//   X_b PSD, u >= 0 (componentwise),
// obtained from the public problem by adding slack variables for inequalities
// and splitting free scalars into differences of nonnegative ones.
struct StandardForm {
    struct DiagCoeff {
        int constraint;
        RVec d; // real diagonal
    };
    struct DenseCoeff {
        int constraint;
        CMat a;
    };
    struct BlockData {
        int dim;
        CMat c;
        std::vector<DiagCoeff> diags;
        std::vector<DenseCoeff> denses;
    };

    std::vector<BlockData> blocks;
    RVec c_lp;  // size n_lp
    RMat a_lp;  // m x n_lp
    RVec b;     // size m
    int m = 0;
    int n_lp = 0;

    // public-scalar j -> lp index of its positive part; negative part follows
    // immediately when the scalar is free
    std::vector<int> scalar_pos;
    std::vector<bool> scalar_free;
};

inline bool is_diagonal(const CMat& a)
{
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            if (r != c && a(r, c) != cplx(0.0, 0.0))
                return false;
    return true;
}

inline StandardForm to_standard_form(const SdpProblem& p)
{
    StandardForm sf;
    sf.m = p.num_constraints();
    sf.b.resize(sf.m);

    // layout of the nonnegative vector: scalar parts first, then one slack
    // per inequality
    sf.scalar_pos.resize(p.num_scalars());
    sf.scalar_free.resize(p.num_scalars());
    int nl = 0;
    for (int j = 0; j < p.num_scalars(); ++j) {
        sf.scalar_pos[j] = nl;
        sf.scalar_free[j] = !p.scalars[j].nonneg;
        nl += sf.scalar_free[j] ? 2 : 1;
    }
    std::vector<int> ineq_slack(p.num_constraints(), -1);
    for (int i = 0; i < p.num_constraints(); ++i)
        if (p.constraints[i].sense == SdpProblem::Sense::LessEqual)
            ineq_slack[i] = nl++;
    sf.n_lp = nl;

    sf.c_lp = RVec::Zero(nl);
    for (int j = 0; j < p.num_scalars(); ++j) {
        sf.c_lp[sf.scalar_pos[j]] = p.objective_scalars[j];
        if (sf.scalar_free[j])
            sf.c_lp[sf.scalar_pos[j] + 1] = -p.objective_scalars[j];
    }

    sf.a_lp = RMat::Zero(sf.m, nl);
    for (int i = 0; i < p.num_constraints(); ++i) {
        const auto& con = p.constraints[i];
        sf.b[i] = con.rhs;
        for (int j = 0; j < p.num_scalars(); ++j) {
            sf.a_lp(i, sf.scalar_pos[j]) = con.scalar_coeffs[j];
            if (sf.scalar_free[j])
                sf.a_lp(i, sf.scalar_pos[j] + 1) = -con.scalar_coeffs[j];
        }
        if (ineq_slack[i] >= 0)
            sf.a_lp(i, ineq_slack[i]) = 1.0;
    }

    sf.blocks.resize(p.num_blocks());
    for (int b = 0; b < p.num_blocks(); ++b) {
        auto& bd = sf.blocks[b];
        bd.dim = p.blocks[b].dim;
        const CMat& cb = p.objective_blocks[b];
        bd.c = cb.size() ? CMat(0.5 * (cb + cb.adjoint())) : CMat(CMat::Zero(bd.dim, bd.dim));
        for (int i = 0; i < p.num_constraints(); ++i) {
            const CMat& a = p.constraints[i].block_coeffs[b];
            if (a.size() == 0 || a.norm() == 0.0)
                continue;
            if (is_diagonal(a))
                bd.diags.push_back({i, a.diagonal().real()});
            else
                bd.denses.push_back({i, 0.5 * (a + a.adjoint())});
        }
    }
    return sf;
}

inline double inner(const CMat& a, const CMat& b) { return a.cwiseProduct(b.conjugate()).sum().real(); }

// Largest t with X + t D >= 0, given the Cholesky factor L of X (X = L L^H).
inline double max_psd_step(const Eigen::LLT<CMat>& llt, const CMat& d)
{
    CMat s = llt.matrixL().solve(d);
    s = llt.matrixL().solve(s.adjoint()).adjoint(); // L^{-1} D L^{-H}
    Eigen::SelfAdjointEigenSolver<CMat> eig(s, Eigen::EigenvaluesOnly);
    const double lam_min = eig.eigenvalues()[0];
    if (lam_min >= 0.0)
        return std::numeric_limits<double>::infinity();
    return -1.0 / lam_min;
}

struct IpmOptions {
    double tol = 1e-7;
    int max_iter = 100;
    double step_frac = 0.98;
};

struct IpmState {
    std::vector<CMat> x, z;
    RVec xl, zl, y;
};

struct IpmResult {
    IpmState state;
    SolveStatus status = SolveStatus::MaxIter;
    double pobj = 0.0, dobj = 0.0;
    double rel_p = 0.0, rel_d = 0.0, rel_gap = 0.0;
    int iterations = 0;
};

class IpmSolver {
public:
    IpmSolver(const StandardForm& sf, const IpmOptions& opt) : sf_(sf), opt_(opt)
    {
        nu_ = sf_.n_lp;
        for (const auto& b : sf_.blocks)
            nu_ += b.dim;
        norm_b_ = sf_.b.norm();
        norm_c_ = sf_.c_lp.squaredNorm();
        for (const auto& b : sf_.blocks)
            norm_c_ += b.c.squaredNorm();
        norm_c_ = std::sqrt(norm_c_);
    }

    IpmResult run()
    {
        initialize();
        IpmResult res;
        // best-so-far snapshot; returned when later iterations stall or
        // wander off (degenerate optima can destabilize the late steps)
        IpmResult best;
        double best_progress = std::numeric_limits<double>::infinity();
        bool have_best = false;
        int stall = 0;

        for (int it = 0; it < opt_.max_iter; ++it) {
            res.iterations = it + 1;
            compute_residuals();
            compute_measures(res);
            if (res.rel_p <= opt_.tol && res.rel_d <= opt_.tol && res.rel_gap <= opt_.tol) {
                res.status = SolveStatus::Optimal;
                res.state = IpmState{x_, z_, xl_, zl_, y_};
                return res;
            }
            if (detect_infeasible(res)) {
                res.state = IpmState{x_, z_, xl_, zl_, y_};
                return res;
            }

            const double progress = std::min(convergence_measure(res), certificate_measure(res));
            if (progress < 0.9 * best_progress) {
                best_progress = std::min(progress, best_progress);
                best = res;
                best.state = IpmState{x_, z_, xl_, zl_, y_};
                have_best = true;
                stall = 0;
            } else if (++stall > 10) {
                break;
            }

            if (!compute_scaling() || !factor_schur())
                break;

            // predictor (affine direction, sigma = 0)
            Direction aff = solve_kkt(affine_rhs());
            double ap = max_step_primal(aff), ad = max_step_dual(aff);
            const double mu = duality_measure();
            const double mu_aff = affine_mu(aff, std::min(1.0, ap), std::min(1.0, ad));
            double sigma = mu > 0.0 ? std::pow(std::max(0.0, mu_aff / mu), 3.0) : 0.0;
            sigma = std::min(1.0, sigma);

            // corrector with Mehrotra second-order term
            Direction dir = solve_kkt(corrector_rhs(aff, sigma * mu));
            ap = std::min(1.0, opt_.step_frac * max_step_primal(dir));
            ad = std::min(1.0, opt_.step_frac * max_step_dual(dir));
            if ((ap < 1e-10 && ad < 1e-10) || !take_step(dir, ap, ad))
                break;
        }

        // stalled or hit the iteration limit: report the best iterate seen
        compute_residuals();
        compute_measures(res);
        res.state = IpmState{x_, z_, xl_, zl_, y_};
        res.status = SolveStatus::MaxIter;
        if (have_best && best_progress < convergence_measure(res)) {
            const int iters = res.iterations;
            res = best;
            res.iterations = iters;
            res.status = SolveStatus::MaxIter;
        }
        return res;
    }

private:
    struct Direction {
        std::vector<CMat> dx, dz;
        RVec dxl, dzl, dy;
    };
    struct ComplRhs {
        std::vector<CMat> blocks;
        RVec lp;
    };

    const StandardForm& sf_;
    IpmOptions opt_;
    double nu_ = 0.0, norm_b_ = 0.0, norm_c_ = 0.0;

    std::vector<CMat> x_, z_;
    RVec xl_, zl_, y_;

    // residuals
    RVec rp_;               // b - A(x)
    std::vector<CMat> rd_;  // C - Z - A*(y) per block
    RVec rd_lp_;

    // NT scaling per block
    std::vector<CMat> w_, r_, rinv_;
    std::vector<RVec> lambda_;
    std::vector<Eigen::LLT<CMat>> llt_x_, llt_z_;
    RVec wl2_; // lp scaling w_i^2 = xl_i / zl_i
    Eigen::LLT<RMat> schur_;

    void initialize()
    {
        const int nb = int(sf_.blocks.size());
        x_.resize(nb);
        z_.resize(nb);
        for (int b = 0; b < nb; ++b) {
            const auto& bd = sf_.blocks[b];
            double amax = 0.0, ratio = 1.0;
            for (const auto& dc : bd.diags) {
                const double an = dc.d.norm();
                amax = std::max(amax, an);
                ratio = std::max(ratio, (1.0 + std::abs(sf_.b[dc.constraint])) / (1.0 + an));
            }
            for (const auto& dc : bd.denses) {
                const double an = dc.a.norm();
                amax = std::max(amax, an);
                ratio = std::max(ratio, (1.0 + std::abs(sf_.b[dc.constraint])) / (1.0 + an));
            }
            const double xi = std::max({10.0, std::sqrt(double(bd.dim)), double(bd.dim) * ratio});
            const double eta = std::max({10.0, std::sqrt(double(bd.dim)), amax, bd.c.norm()});
            x_[b] = xi * CMat::Identity(bd.dim, bd.dim);
            z_[b] = eta * CMat::Identity(bd.dim, bd.dim);
        }
        double ratio_lp = 1.0, amax_lp = 0.0;
        for (int i = 0; i < sf_.m; ++i) {
            const double an = sf_.a_lp.row(i).norm();
            amax_lp = std::max(amax_lp, an);
            ratio_lp = std::max(ratio_lp, (1.0 + std::abs(sf_.b[i])) / (1.0 + an));
        }
        xl_ = RVec::Constant(sf_.n_lp, std::max(10.0, ratio_lp));
        zl_.resize(sf_.n_lp);
        for (int v = 0; v < sf_.n_lp; ++v)
            zl_[v] = std::max({10.0, amax_lp, std::abs(sf_.c_lp[v])});
        y_ = RVec::Zero(sf_.m);
    }

    double duality_measure() const
    {
        double s = xl_.dot(zl_);
        for (size_t b = 0; b < x_.size(); ++b)
            s += inner(x_[b], z_[b]);
        return s / nu_;
    }

    void compute_residuals()
    {
        rp_ = sf_.b - sf_.a_lp * xl_;
        for (size_t b = 0; b < x_.size(); ++b) {
            const auto& bd = sf_.blocks[b];
            for (const auto& dc : bd.diags)
                rp_[dc.constraint] -= dc.d.dot(x_[b].diagonal().real());
            for (const auto& dc : bd.denses)
                rp_[dc.constraint] -= inner(dc.a, x_[b]);
        }
        rd_.resize(x_.size());
        for (size_t b = 0; b < x_.size(); ++b) {
            const auto& bd = sf_.blocks[b];
            CMat r = bd.c - z_[b];
            for (const auto& dc : bd.diags)
                r.diagonal() -= (y_[dc.constraint] * dc.d).cast<cplx>();
            for (const auto& dc : bd.denses)
                r.noalias() -= y_[dc.constraint] * dc.a;
            rd_[b] = std::move(r);
        }
        rd_lp_ = sf_.c_lp - zl_ - sf_.a_lp.transpose() * y_;
    }

    static double convergence_measure(const IpmResult& res)
    {
        return std::max({res.rel_p, res.rel_d, res.rel_gap});
    }

    // quality of the best infeasibility/unboundedness certificate implied by
    // the iterate; improving it counts as progress so that diverging rays are
    // not cut off by the stall guard
    double certificate_measure(const IpmResult& res) const
    {
        double q = std::numeric_limits<double>::infinity();
        if (res.dobj > 0.0) {
            double cert = (rd_lp_ - sf_.c_lp).squaredNorm();
            for (size_t b = 0; b < rd_.size(); ++b)
                cert += (rd_[b] - sf_.blocks[b].c).squaredNorm();
            q = std::min(q, std::sqrt(cert) / res.dobj);
        }
        if (-res.pobj > 0.0)
            q = std::min(q, ((sf_.b - rp_).norm() + 1.0) / (-res.pobj));
        return q;
    }

    void compute_measures(IpmResult& res) const
    {
        double pobj = sf_.c_lp.dot(xl_);
        for (size_t b = 0; b < x_.size(); ++b)
            pobj += inner(sf_.blocks[b].c, x_[b]);
        const double dobj = sf_.b.dot(y_);
        double rdn = rd_lp_.squaredNorm();
        for (const auto& r : rd_)
            rdn += r.squaredNorm();
        res.pobj = pobj;
        res.dobj = dobj;
        res.rel_p = rp_.norm() / (1.0 + norm_b_);
        res.rel_d = std::sqrt(rdn) / (1.0 + norm_c_);
        res.rel_gap = std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));
    }

    bool detect_infeasible(IpmResult& res) const
    {
        // primal infeasibility: dual objective diverges along a certificate ray
        const double by = res.dobj;
        if (by > 0.0 && res.rel_p > opt_.tol) {
            double cert = (rd_lp_ - sf_.c_lp).squaredNorm();
            for (size_t b = 0; b < rd_.size(); ++b)
                cert += (rd_[b] - sf_.blocks[b].c).squaredNorm(); // = ||Z + A*(y)||^2
            if (std::sqrt(cert) <= 1e-6 * by) {
                res.status = SolveStatus::Infeasible;
                return true;
            }
        }
        // dual infeasibility: primal objective diverges along a feasible ray
        if (-res.pobj > 0.0 && res.rel_d > opt_.tol) {
            const double q = -res.pobj;
            if ((sf_.b - rp_).norm() + 1.0 <= 1e-6 * q) {
                res.status = SolveStatus::Unbounded;
                return true;
            }
        }
        return false;
    }

    // Small bounded jitter only; a matrix that stays indefinite beyond
    // roundoff level must stop the solver instead of silently deforming the
    // scaling (an overscaled step could leave the cone).
    static bool chol_with_jitter(const CMat& a, Eigen::LLT<CMat>& out)
    {
        out.compute(a);
        if (out.info() == Eigen::Success)
            return true;
        const double base = a.diagonal().real().cwiseAbs().maxCoeff();
        double jitter = 1e-14 * (base > 0.0 ? base : 1.0);
        for (int t = 0; t < 4; ++t) {
            out.compute(a + jitter * CMat::Identity(a.rows(), a.cols()));
            if (out.info() == Eigen::Success)
                return true;
            jitter *= 100.0;
        }
        return false;
    }

    // Nesterov-Todd scaling: R with X = R diag(lambda) R^H, Z = R^{-H} diag(lambda) R^{-1},
    // W = R R^H. Computed from Cholesky factors and the SVD of L_z^H L_x.
    bool compute_scaling()
    {
        const size_t nb = x_.size();
        w_.resize(nb);
        r_.resize(nb);
        rinv_.resize(nb);
        lambda_.resize(nb);
        llt_x_.resize(nb);
        llt_z_.resize(nb);
        for (size_t b = 0; b < nb; ++b) {
            if (!chol_with_jitter(x_[b], llt_x_[b]) || !chol_with_jitter(z_[b], llt_z_[b]))
                return false;
            const CMat lx = llt_x_[b].matrixL();
            const CMat lz = llt_z_[b].matrixL();
            Eigen::BDCSVD<CMat> svd(lz.adjoint() * lx, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const RVec& sv = svd.singularValues();
            if (sv.minCoeff() <= 0.0)
                return false;
            const RVec si = sv.cwiseSqrt().cwiseInverse();
            r_[b] = lx * svd.matrixV() * si.asDiagonal();
            rinv_[b] = si.asDiagonal() * svd.matrixU().adjoint() * lz.adjoint();
            w_[b].noalias() = r_[b] * r_[b].adjoint();
            lambda_[b] = sv;
        }
        wl2_ = xl_.cwiseQuotient(zl_);
        return true;
    }

    // Schur complement M_ij = sum_b <A_ib, W A_jb W> + sum_v wl2_v a_iv a_jv,
    // assembled with a fast path for diagonal coefficient matrices.
    bool factor_schur()
    {
        RMat m = sf_.a_lp * wl2_.asDiagonal() * sf_.a_lp.transpose();
        for (size_t b = 0; b < x_.size(); ++b) {
            const auto& bd = sf_.blocks[b];
            if (!bd.diags.empty()) {
                RMat p = w_[b].cwiseAbs2(); // p_rc = |W_rc|^2
                RMat dmat(bd.dim, int(bd.diags.size()));
                for (int j = 0; j < int(bd.diags.size()); ++j)
                    dmat.col(j) = bd.diags[j].d;
                RMat pd = p * dmat;
                for (int i = 0; i < int(bd.diags.size()); ++i)
                    for (int j = 0; j < int(bd.diags.size()); ++j)
                        m(bd.diags[i].constraint, bd.diags[j].constraint) += dmat.col(i).dot(pd.col(j));
            }
            for (size_t j = 0; j < bd.denses.size(); ++j) {
                CMat t = w_[b] * bd.denses[j].a * w_[b];
                const RVec tdiag = t.diagonal().real();
                for (const auto& dc : bd.diags) {
                    const double v = dc.d.dot(tdiag);
                    m(dc.constraint, bd.denses[j].constraint) += v;
                    m(bd.denses[j].constraint, dc.constraint) += v;
                }
                for (size_t i = 0; i <= j; ++i) {
                    const double v = inner(bd.denses[i].a, t);
                    m(bd.denses[i].constraint, bd.denses[j].constraint) += v;
                    if (i != j)
                        m(bd.denses[j].constraint, bd.denses[i].constraint) += v;
                }
            }
        }
        m = 0.5 * (m + m.transpose());
        schur_.compute(m);
        if (schur_.info() == Eigen::Success)
            return true;
        double jitter = 1e-13 * (1.0 + m.diagonal().cwiseAbs().maxCoeff());
        for (int t = 0; t < 10; ++t) {
            schur_.compute(m + jitter * RMat::Identity(sf_.m, sf_.m));
            if (schur_.info() == Eigen::Success)
                return true;
            jitter *= 100.0;
        }
        return false;
    }

    ComplRhs affine_rhs() const
    {
        ComplRhs rhs;
        rhs.blocks.resize(x_.size());
        for (size_t b = 0; b < x_.size(); ++b)
            rhs.blocks[b] = -x_[b];
        rhs.lp = -xl_;
        return rhs;
    }

    // Mehrotra corrector: in the scaled space the target is
    //   sigma*mu*I - lambda^2 - (Dx_aff o Dz_aff),
    // mapped back through R after dividing by the Jordan operator of lambda.
    ComplRhs corrector_rhs(const Direction& aff, double sigma_mu) const
    {
        ComplRhs rhs;
        rhs.blocks.resize(x_.size());
        for (size_t b = 0; b < x_.size(); ++b) {
            const CMat dxs = rinv_[b] * aff.dx[b] * rinv_[b].adjoint();
            const CMat dzs = r_[b].adjoint() * aff.dz[b] * r_[b];
            const CMat cross = 0.5 * (dxs * dzs + dzs * dxs);
            // u = (lambda o)^{-1} g with (lambda o u)_pq = (lam_p + lam_q)/2 u_pq
            const RVec& lam = lambda_[b];
            CMat u(lam.size(), lam.size());
            for (Eigen::Index p = 0; p < lam.size(); ++p) {
                for (Eigen::Index q = 0; q < lam.size(); ++q) {
                    cplx g = -cross(p, q);
                    if (p == q)
                        g += sigma_mu - lam[p] * lam[p];
                    u(p, q) = 2.0 * g / (lam[p] + lam[q]);
                }
            }
            rhs.blocks[b] = r_[b] * u * r_[b].adjoint();
        }
        rhs.lp.resize(sf_.n_lp);
        for (int v = 0; v < sf_.n_lp; ++v)
            rhs.lp[v] = (sigma_mu - xl_[v] * zl_[v] - aff.dxl[v] * aff.dzl[v]) / zl_[v];
        return rhs;
    }

    // Solves the Newton system for a given complementarity right-hand side,
    // with the current (rp, rd) residuals:
    //   M dy = rp - A(rhs_compl) + A(W rd W)
    //   dZ = rd - A*(dy),  dX = rhs_compl - W dZ W
    Direction solve_kkt(const ComplRhs& rhs) const
    {
        const size_t nb = x_.size();
        std::vector<CMat> wrdw(nb);
        for (size_t b = 0; b < nb; ++b)
            wrdw[b] = w_[b] * rd_[b] * w_[b];

        RVec rhs_y = rp_ - sf_.a_lp * rhs.lp + sf_.a_lp * wl2_.cwiseProduct(rd_lp_).matrix();
        for (size_t b = 0; b < nb; ++b) {
            const auto& bd = sf_.blocks[b];
            const RVec rc_diag = rhs.blocks[b].diagonal().real();
            const RVec wr_diag = wrdw[b].diagonal().real();
            for (const auto& dc : bd.diags)
                rhs_y[dc.constraint] += dc.d.dot(wr_diag) - dc.d.dot(rc_diag);
            for (const auto& dc : bd.denses)
                rhs_y[dc.constraint] += inner(dc.a, wrdw[b]) - inner(dc.a, rhs.blocks[b]);
        }

        Direction dir;
        dir.dy = schur_.solve(rhs_y);
        dir.dz.resize(nb);
        dir.dx.resize(nb);
        for (size_t b = 0; b < nb; ++b) {
            const auto& bd = sf_.blocks[b];
            CMat dz = rd_[b];
            for (const auto& dc : bd.diags)
                dz.diagonal() -= (dir.dy[dc.constraint] * dc.d).cast<cplx>();
            for (const auto& dc : bd.denses)
                dz.noalias() -= dir.dy[dc.constraint] * dc.a;
            dir.dz[b] = 0.5 * (dz + dz.adjoint());
            CMat dx = rhs.blocks[b] - w_[b] * dir.dz[b] * w_[b];
            dir.dx[b] = 0.5 * (dx + dx.adjoint());
        }
        dir.dzl = rd_lp_ - sf_.a_lp.transpose() * dir.dy;
        dir.dxl = rhs.lp - wl2_.cwiseProduct(dir.dzl);
        return dir;
    }

    double max_step_primal(const Direction& d) const
    {
        double a = std::numeric_limits<double>::infinity();
        for (size_t b = 0; b < x_.size(); ++b)
            a = std::min(a, max_psd_step(llt_x_[b], d.dx[b]));
        for (int v = 0; v < sf_.n_lp; ++v)
            if (d.dxl[v] < 0.0)
                a = std::min(a, -xl_[v] / d.dxl[v]);
        return a;
    }

    double max_step_dual(const Direction& d) const
    {
        double a = std::numeric_limits<double>::infinity();
        for (size_t b = 0; b < z_.size(); ++b)
            a = std::min(a, max_psd_step(llt_z_[b], d.dz[b]));
        for (int v = 0; v < sf_.n_lp; ++v)
            if (d.dzl[v] < 0.0)
                a = std::min(a, -zl_[v] / d.dzl[v]);
        return a;
    }

    double affine_mu(const Direction& d, double ap, double ad) const
    {
        double s = (xl_ + ap * d.dxl).dot(zl_ + ad * d.dzl);
        for (size_t b = 0; b < x_.size(); ++b)
            s += inner(x_[b] + ap * d.dx[b], z_[b] + ad * d.dz[b]);
        return std::max(0.0, s / nu_);
    }

    // Applies the step only if the result verifiably stays in the cone
    // (Cholesky check), shrinking the step a few times otherwise.
    bool take_step(const Direction& d, double ap, double ad)
    {
        for (int attempt = 0; attempt < 12; ++attempt) {
            std::vector<CMat> xn(x_.size()), zn(z_.size());
            bool ok = true;
            for (size_t b = 0; b < x_.size() && ok; ++b) {
                xn[b] = x_[b] + ap * d.dx[b];
                xn[b] = 0.5 * (xn[b] + xn[b].adjoint());
                zn[b] = z_[b] + ad * d.dz[b];
                zn[b] = 0.5 * (zn[b] + zn[b].adjoint());
                ok = Eigen::LLT<CMat>(xn[b]).info() == Eigen::Success &&
                     Eigen::LLT<CMat>(zn[b]).info() == Eigen::Success;
            }
            RVec xln = xl_ + ap * d.dxl;
            RVec zln = zl_ + ad * d.dzl;
            ok = ok && (sf_.n_lp == 0 || (xln.minCoeff() > 0.0 && zln.minCoeff() > 0.0));
            if (ok) {
                x_ = std::move(xn);
                z_ = std::move(zn);
                xl_ = std::move(xln);
                zl_ = std::move(zln);
                y_ += ad * d.dy;
                return true;
            }
            ap *= 0.5;
            ad *= 0.5;
        }
        return false;
    }
};

} // namespace detail

/// Solves a Hermitian-block SDP with an infeasible-start primal-dual
/// path-following interior-point method (Nesterov-Todd scaling, Mehrotra
/// predictor-corrector, dense linear algebra).
inline SdpSolution solve(const SdpProblem& problem, double tol = 1e-7, int max_iter = 100)
{
    problem.validate();
    if (tol <= 0.0 || max_iter < 1)
        throw std::invalid_argument("solve: tol must be > 0 and max_iter >= 1");

    detail::StandardForm sf = detail::to_standard_form(problem);
    detail::IpmOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    detail::IpmResult r = detail::IpmSolver(sf, opt).run();

    SdpSolution sol;
    sol.status = r.status;
    sol.iterations = r.iterations;
    sol.dual_residual = r.rel_d;
    sol.duality_gap = r.rel_gap;
    sol.block_values = r.state.x;
    sol.scalar_values.resize(problem.num_scalars());
    for (int j = 0; j < problem.num_scalars(); ++j) {
        double v = r.state.xl[sf.scalar_pos[j]];
        if (sf.scalar_free[j])
            v -= r.state.xl[sf.scalar_pos[j] + 1];
        sol.scalar_values[j] = v;
    }

    // objective and per-constraint feasibility are reported against the
    // original problem data
    double obj = problem.num_scalars() ? problem.objective_scalars.dot(sol.scalar_values) : 0.0;
    for (int b = 0; b < problem.num_blocks(); ++b)
        if (problem.objective_blocks[b].size())
            obj += detail::inner(problem.objective_blocks[b], sol.block_values[b]);
    sol.objective = obj;

    double max_viol = 0.0;
    for (const auto& con : problem.constraints) {
        double lhs = problem.num_scalars() ? con.scalar_coeffs.dot(sol.scalar_values) : 0.0;
        for (int b = 0; b < problem.num_blocks(); ++b)
            if (con.block_coeffs[b].size())
                lhs += detail::inner(con.block_coeffs[b], sol.block_values[b]);
        const double raw = lhs - con.rhs;
        const double viol = con.sense == SdpProblem::Sense::Equal ? std::abs(raw) : std::max(0.0, raw);
        max_viol = std::max(max_viol, viol / (1.0 + std::abs(con.rhs)));
    }
    sol.primal_residual = max_viol;
    return sol;
}

} // namespace hybeam::conic
