// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <string>
#include <vector>

#include "hybeam/common.hpp"
#include "hybeam/conic/psd.hpp"

namespace hybeam::conic {

/// Linear conic program over Hermitian PSD matrix blocks and real scalars:
///
///   minimize    sum_b Re Tr(C_b X_b) + c^T s
///   subject to  sum_b Re Tr(A_{i,b} X_b) + a_i^T s  (<= or =)  rhs_i
///               X_b >= 0 (PSD), s_j >= 0 where flagged
///
/// All coefficient matrices must be Hermitian. An empty (0x0) coefficient
/// stands for a zero contribution of that block.
struct SdpProblem {
    struct Block {
        std::string name;
        int dim = 0;
    };
    struct Scalar {
        std::string name;
        bool nonneg = true;
    };
    enum class Sense { LessEqual, Equal };
    struct Constraint {
        std::vector<CMat> block_coeffs; // one per block, 0x0 = zero
        RVec scalar_coeffs;             // one per scalar (may be size 0 if no scalars)
        Sense sense = Sense::Equal;
        double rhs = 0.0;
    };

    std::vector<Block> blocks;
    std::vector<Scalar> scalars;
    std::vector<CMat> objective_blocks; // one per block, 0x0 = zero
    RVec objective_scalars;             // one per scalar
    std::vector<Constraint> constraints;

    int num_blocks() const { return int(blocks.size()); }
    int num_scalars() const { return int(scalars.size()); }
    int num_constraints() const { return int(constraints.size()); }

    void validate() const
    {
        if (blocks.empty() && scalars.empty())
            throw std::invalid_argument("SdpProblem: needs at least one variable");
        for (const auto& b : blocks)
            if (b.dim < 1)
                throw std::invalid_argument("SdpProblem: block dimension must be >= 1");
        if (int(objective_blocks.size()) != num_blocks())
            throw std::invalid_argument("SdpProblem: objective_blocks size mismatch");
        if (int(objective_scalars.size()) != num_scalars())
            throw std::invalid_argument("SdpProblem: objective_scalars size mismatch");
        check_coeffs(objective_blocks, "objective");
        for (const auto& c : constraints) {
            if (int(c.block_coeffs.size()) != num_blocks())
                throw std::invalid_argument("SdpProblem: constraint block_coeffs size mismatch");
            if (int(c.scalar_coeffs.size()) != num_scalars())
                throw std::invalid_argument("SdpProblem: constraint scalar_coeffs size mismatch");
            check_coeffs(c.block_coeffs, "constraint");
        }
    }

private:
    void check_coeffs(const std::vector<CMat>& coeffs, const char* what) const
    {
        for (int b = 0; b < int(coeffs.size()); ++b) {
            const CMat& m = coeffs[b];
            if (m.size() == 0)
                continue;
            if (m.rows() != blocks[b].dim || m.cols() != blocks[b].dim)
                throw std::invalid_argument(std::string("SdpProblem: ") + what +
                                            " coefficient has wrong dimension");
            require_hermitian(m, what);
        }
    }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

inline const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIter: return "max_iter";
    }
    return "unknown";
}

struct SdpSolution {
    std::vector<CMat> block_values;
    RVec scalar_values;
    double objective = 0.0;
    double primal_residual = 0.0; // max constraint violation / (1 + |rhs|)
    double dual_residual = 0.0;   // relative dual infeasibility at exit
    double duality_gap = 0.0;     // |pobj - dobj| / (1 + max(|pobj|, |dobj|))
    SolveStatus status = SolveStatus::MaxIter;
    int iterations = 0;
};

} // namespace hybeam::conic
