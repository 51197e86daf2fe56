// SPDX-License-Identifier: Apache-2.0
//
// fdsec: secure transmit covariance design for full-duplex bidirectional links
// Copyright (C) 2026 The fdsec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FDSEC_RNG_HPP
#define FDSEC_RNG_HPP

#include "core.hpp"

#include <cstdint>
#include <random>

namespace fdsec
{

using rng_engine = std::mt19937_64;

/// splitmix64 finalizer, used to derive independent per-trial streams from one master seed.
inline std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for stream `stream`, index `index` under `master` (split-by-counter).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index)
{
    return mix_seed(mix_seed(mix_seed(master) ^ stream) ^ index);
}

/// Circularly-symmetric complex Gaussian with zero mean and unit variance.
inline cplx complex_normal(rng_engine &rng)
{
    std::normal_distribution<double> half(0.0, std::sqrt(0.5));
    const double re = half(rng);
    const double im = half(rng);
    return {re, im};
}

inline cvec complex_normal_vector(rng_engine &rng, Eigen::Index n)
{
    cvec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = complex_normal(rng);
    return v;
}

inline cmat complex_normal_matrix(rng_engine &rng, Eigen::Index rows, Eigen::Index cols)
{
    cmat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = complex_normal(rng);
    return m;
}

} // namespace fdsec

#endif // FDSEC_RNG_HPP
