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
//
// Dimension reduction. The rates depend on Q_a only through quadratic forms
// in h_ab, h_aa and h_ae, so Q_a = U_a W_a U_a^H with U_a spanning those
// three channels loses nothing (same for Bob). The reduced variables are at
// most 3x3 regardless of the antenna count.

#ifndef FDSEC_REDUCTION_HPP
#define FDSEC_REDUCTION_HPP

#include "model.hpp"

#include <initializer_list>
#include <span>
#include <vector>

namespace fdsec
{

/// Orthonormal basis of span(columns) by twice-iterated modified Gram-Schmidt.
/// Columns whose residual falls below 1e-9 * (largest column norm) are dropped.
inline cmat orthonormal_basis(std::span<const cvec> columns)
{
    require(!columns.empty(), errc::invalid_argument, "orthonormal_basis needs at least one column");
    const auto n = columns.front().size();
    double max_norm = 0.0;
    for (const auto &c : columns)
    {
        require(c.size() == n, errc::dimension_mismatch, "basis columns differ in length");
        max_norm = std::max(max_norm, c.norm());
    }
    require(max_norm > 0.0, errc::degenerate_channel, "degenerate channel set");

    std::vector<cvec> basis;
    for (const auto &c : columns)
    {
        cvec v = c;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto &b : basis)
                v -= b * b.dot(v);
        const double r = v.norm();
        if (r >= 1e-9 * max_norm && static_cast<Eigen::Index>(basis.size()) < n)
            basis.push_back(v / r);
    }
    cmat u(n, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k)
        u.col(static_cast<Eigen::Index>(k)) = basis[k];
    return u;
}

inline cmat orthonormal_basis(std::initializer_list<cvec> columns)
{
    std::vector<cvec> cols(columns);
    return orthonormal_basis(std::span<const cvec>(cols));
}

struct ReducedProblem
{
    cmat u_a, u_b;                ///< N x r_a and N x r_b, semi-unitary
    cvec ht_ab, ht_aa, ht_ae;     ///< U_a^H h
    cvec ht_ba, ht_bb, ht_be;     ///< U_b^H h
    SystemParams params;

    int r_a() const { return static_cast<int>(u_a.cols()); }
    int r_b() const { return static_cast<int>(u_b.cols()); }

    /// Alice <-> Bob role swap, used to run Bob's update through Alice's code path.
    ReducedProblem mirrored() const
    {
        return {u_b, u_a, ht_ba, ht_bb, ht_be, ht_ab, ht_aa, ht_ae, params.mirrored()};
    }
};

struct ReducedCovariancePair
{
    cmat w_a;
    cmat w_b;

    ReducedCovariancePair mirrored() const { return {w_b, w_a}; }
};

inline ReducedProblem reduce(const ChannelSet &ch, const SystemParams &p)
{
    p.validate();
    ch.validate(p.n_tx);
    ReducedProblem rp;
    rp.u_a = orthonormal_basis({ch.h_ab, ch.h_aa, ch.h_ae});
    rp.u_b = orthonormal_basis({ch.h_ba, ch.h_bb, ch.h_be});
    rp.ht_ab = rp.u_a.adjoint() * ch.h_ab;
    rp.ht_aa = rp.u_a.adjoint() * ch.h_aa;
    rp.ht_ae = rp.u_a.adjoint() * ch.h_ae;
    rp.ht_ba = rp.u_b.adjoint() * ch.h_ba;
    rp.ht_bb = rp.u_b.adjoint() * ch.h_bb;
    rp.ht_be = rp.u_b.adjoint() * ch.h_be;
    rp.params = p;
    return rp;
}

inline CovariancePair lift(const ReducedCovariancePair &w, const ReducedProblem &rp)
{
    require(w.w_a.rows() == rp.r_a() && w.w_a.cols() == rp.r_a() && w.w_b.rows() == rp.r_b() &&
                w.w_b.cols() == rp.r_b(),
            errc::dimension_mismatch, "reduced covariance does not match the basis rank");
    return {rp.u_a * hermitian_part(w.w_a) * rp.u_a.adjoint(), rp.u_b * hermitian_part(w.w_b) * rp.u_b.adjoint()};
}

/// Rates of the reduced problem in nats. Kept separate so solvers can work
/// in natural log and convert once at the boundary.
struct ReducedRatesNats
{
    double r_a = 0, r_b = 0, r_e = 0;
    double objective() const { return r_a + r_b - r_e; }
};

inline ReducedRatesNats reduced_rates_nats(const ReducedCovariancePair &w, const ReducedProblem &rp)
{
    const auto &p = rp.params;
    const double sig_ba = quad_form(rp.ht_ba, w.w_b);
    const double si_aa = quad_form(rp.ht_aa, w.w_a);
    const double sig_ab = quad_form(rp.ht_ab, w.w_a);
    const double si_bb = quad_form(rp.ht_bb, w.w_b);
    const double leak = quad_form(rp.ht_ae, w.w_a) + quad_form(rp.ht_be, w.w_b);
    ReducedRatesNats r;
    r.r_a = std::log1p(sig_ba / (p.sigma_a2 + p.zeta_a * si_aa));
    r.r_b = std::log1p(sig_ab / (p.sigma_b2 + p.zeta_b * si_bb));
    r.r_e = std::log1p(leak / p.sigma_e2);
    return r;
}

/// Reduced rates in bits/s/Hz; `ssr` is the unclamped objective R_a + R_b - R_e.
inline RateSet reduced_rates(const ReducedCovariancePair &w, const ReducedProblem &rp)
{
    const auto r = reduced_rates_nats(w, rp);
    return {r.r_a / ln2, r.r_b / ln2, r.r_e / ln2, r.objective() / ln2};
}

/// Unclamped reduced objective R_a + R_b - R_e in bits/s/Hz.
inline double reduced_objective(const ReducedCovariancePair &w, const ReducedProblem &rp)
{
    return reduced_rates_nats(w, rp).objective() / ln2;
}

} // namespace fdsec

#endif // FDSEC_REDUCTION_HPP
