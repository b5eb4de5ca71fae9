// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "hybeam/common.hpp"

namespace hybeam::conic {

inline bool is_hermitian(const CMat& a, double rel_tol = 1e-10)
{
    if (a.rows() != a.cols())
        return false;
    return (a - a.adjoint()).norm() <= rel_tol * (1.0 + a.norm());
}

inline void require_hermitian(const CMat& a, const char* what)
{
    if (!is_hermitian(a))
        throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
}

/// Ratio of the two largest eigenvalues lambda_2 / lambda_1 of a Hermitian PSD
/// matrix; 0 for dimension 1. Used to monitor how close a relaxed lift is to
/// rank one.
inline double dominant_rank_ratio(const CMat& x)
{
    require_hermitian(x, "dominant_rank_ratio");
    const Eigen::Index n = x.rows();
    if (n == 1)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<CMat> eig(x, Eigen::EigenvaluesOnly);
    const RVec& ev = eig.eigenvalues(); // ascending
    const double top = ev[n - 1];
    if (top <= 0.0)
        return 0.0;
    return ev[n - 2] / top;
}

/// Factor A with A^H A = X from the eigendecomposition of a Hermitian PSD X,
/// rows ordered by descending eigenvalue; tiny negative eigenvalues (down to
/// -eps_clamp * ||X||_2) are clamped to zero, anything lower is rejected.
inline CMat hermitian_sqrt_factor(const CMat& x, double eps_clamp = 1e-8)
{
    require_hermitian(x, "hermitian_sqrt_factor");
    Eigen::SelfAdjointEigenSolver<CMat> eig(x);
    const RVec& ev = eig.eigenvalues(); // ascending
    const Eigen::Index n = x.rows();
    const double spectral = std::max(std::abs(ev[0]), std::abs(ev[n - 1]));
    if (ev[0] < -eps_clamp * spectral)
        throw std::invalid_argument("hermitian_sqrt_factor: matrix is not positive semidefinite");

    CMat a(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Eigen::Index src = n - 1 - r; // descending order
        const double lam = ev[src] > 0.0 ? ev[src] : 0.0;
        a.row(r) = std::sqrt(lam) * eig.eigenvectors().col(src).adjoint();
    }
    return a;
}

/// Factor Q with Q^T Q^* = X (the paper-facing convention: column q_n carries
/// the lift of entry n). Q = conj(A) with A^H A = X.
inline CMat psd_factor(const CMat& x, double eps_clamp = 1e-8)
{
    return hermitian_sqrt_factor(x, eps_clamp).conjugate();
}

} // namespace hybeam::conic
