// SPDX-License-Identifier: Apache-2.0
//
// hybeam: hybrid precoder / combiner design for multi-group multicasting
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "hybeam/conic/problem.hpp"

namespace hybeam::conic {

namespace detail_io {

inline nlohmann::json matrix_to_json(const CMat& m)
{
    if (m.size() == 0)
        return nullptr;
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            rows.push_back({m(r, c).real(), m(r, c).imag()});
    return nlohmann::json{{"dim", m.rows()}, {"entries", rows}};
}

inline CMat matrix_from_json(const nlohmann::json& j)
{
    if (j.is_null())
        return CMat();
    const int dim = j.at("dim").get<int>();
    const auto& e = j.at("entries");
    if (int(e.size()) != dim * dim)
        throw std::invalid_argument("conic json: entry count does not match dim^2");
    CMat m(dim, dim);
    int idx = 0;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c, ++idx)
            m(r, c) = cplx(e[idx][0].get<double>(), e[idx][1].get<double>());
    return m;
}

} // namespace detail_io

/// Self-describing dump of an SdpProblem, mainly for debugging a failing
/// sub-problem or cross-checking against an external solver.
inline nlohmann::json to_json(const SdpProblem& p)
{
    nlohmann::json j;
    j["blocks"] = nlohmann::json::array();
    for (const auto& b : p.blocks)
        j["blocks"].push_back({{"name", b.name}, {"dim", b.dim}});
    j["scalars"] = nlohmann::json::array();
    for (const auto& s : p.scalars)
        j["scalars"].push_back({{"name", s.name}, {"nonneg", s.nonneg}});
    j["objective"]["blocks"] = nlohmann::json::array();
    for (const auto& m : p.objective_blocks)
        j["objective"]["blocks"].push_back(detail_io::matrix_to_json(m));
    j["objective"]["scalars"] = std::vector<double>(p.objective_scalars.begin(), p.objective_scalars.end());
    j["constraints"] = nlohmann::json::array();
    for (const auto& c : p.constraints) {
        nlohmann::json jc;
        jc["blocks"] = nlohmann::json::array();
        for (const auto& m : c.block_coeffs)
            jc["blocks"].push_back(detail_io::matrix_to_json(m));
        jc["scalars"] = std::vector<double>(c.scalar_coeffs.begin(), c.scalar_coeffs.end());
        jc["sense"] = c.sense == SdpProblem::Sense::Equal ? "=" : "<=";
        jc["rhs"] = c.rhs;
        j["constraints"].push_back(jc);
    }
    return j;
}

inline SdpProblem from_json(const nlohmann::json& j)
{
    SdpProblem p;
    for (const auto& b : j.at("blocks"))
        p.blocks.push_back({b.at("name").get<std::string>(), b.at("dim").get<int>()});
    for (const auto& s : j.at("scalars"))
        p.scalars.push_back({s.at("name").get<std::string>(), s.at("nonneg").get<bool>()});
    for (const auto& m : j.at("objective").at("blocks"))
        p.objective_blocks.push_back(detail_io::matrix_from_json(m));
    const auto obj_s = j.at("objective").at("scalars").get<std::vector<double>>();
    p.objective_scalars = Eigen::Map<const RVec>(obj_s.data(), Eigen::Index(obj_s.size()));
    for (const auto& jc : j.at("constraints")) {
        SdpProblem::Constraint c;
        for (const auto& m : jc.at("blocks"))
            c.block_coeffs.push_back(detail_io::matrix_from_json(m));
        const auto sc = jc.at("scalars").get<std::vector<double>>();
        c.scalar_coeffs = Eigen::Map<const RVec>(sc.data(), Eigen::Index(sc.size()));
        c.sense = jc.at("sense").get<std::string>() == "=" ? SdpProblem::Sense::Equal
                                                           : SdpProblem::Sense::LessEqual;
        c.rhs = jc.at("rhs").get<double>();
        p.constraints.push_back(std::move(c));
    }
    p.validate();
    return p;
}

inline void dump_problem(const SdpProblem& p, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("dump_problem: cannot open " + path);
    out << to_json(p).dump(2) << "\n";
}

inline SdpProblem load_problem(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("load_problem: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

} // namespace hybeam::conic
