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
#include <cstdint>
#include <initializer_list>
#include <random>

#include "hybeam/common.hpp"

namespace hybeam {

namespace detail {

// splitmix64 step, used only to mix seeds when deriving streams
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic random stream. All distribution mappings are implemented
/// here (not via std:: distributions) so that identical seeds give identical
/// draws on every platform and compiler.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    /// Counter-based splitting: mixes the master seed with a path of indices
    /// so that (point, realization, stage, ...) streams are independent and
    /// insensitive to evaluation order.
    static std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
    {
        std::uint64_t state = master ^ 0xa0761d6478bd642fULL;
        std::uint64_t mixed = detail::splitmix64(state);
        for (std::uint64_t p : path) {
            state ^= p + 0x8ebc6af09c88c6e3ULL;
            mixed ^= detail::splitmix64(state);
        }
        return mixed;
    }

    static RngStream derive(std::uint64_t master, std::initializer_list<std::uint64_t> path)
    {
        return RngStream(derive_seed(master, path));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return double(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard real Gaussian via Box-Muller (pairs cached).
    double gaussian()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0)
            u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * pi * uniform01();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    /// Standard circularly-symmetric complex Gaussian CN(0, 1), E|z|^2 = 1.
    cplx cgaussian()
    {
        double u1 = uniform01();
        while (u1 <= 0.0)
            u1 = uniform01();
        const double mag = std::sqrt(-std::log(u1));
        const double ph = 2.0 * pi * uniform01();
        return cplx(mag * std::cos(ph), mag * std::sin(ph));
    }

    CVec cgaussian_vector(Eigen::Index n)
    {
        CVec v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = cgaussian();
        return v;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace hybeam
