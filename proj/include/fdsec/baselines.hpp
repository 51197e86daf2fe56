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
// Reference designs: full duplex with self-interference zero forcing (FD-ZF)
// and half duplex with one direction per slot (HD-DC).

#ifndef FDSEC_BASELINES_HPP
#define FDSEC_BASELINES_HPP

#include "adc.hpp"
#include "model.hpp"
#include "reduction.hpp"

namespace fdsec
{

/// Orthonormal basis of the orthogonal complement of h (N x (N-1)).
inline cmat null_space_basis(const cvec &h)
{
    const auto n = h.size();
    require(n >= 2, errc::invalid_argument, "zero forcing needs at least two antennas");
    require(h.norm() > 0, errc::degenerate_channel, "cannot null a zero channel");
    // Householder QR of h: the trailing columns of Q span h's complement.
    Eigen::HouseholderQR<cmat> qr(h);
    const cmat q = qr.householderQ() * cmat::Identity(n, n);
    return q.rightCols(n - 1);
}

/// Maximizer of log(s_t + t^H Q t) - log(s_e + e^H Q e) over Q PSD, Tr(Q) <= p.
/// The optimum is either Q = 0 or rank one at full power along the principal generalized
/// eigenvector of (s_t/p I + t t^H, s_e/p I + e e^H).
inline cmat wiretap_covariance(const cvec &t, const cvec &e, double s_t, double s_e, double p)
{
    const auto n = t.size();
    const cmat eye = cmat::Identity(n, n);
    const cmat a = s_t / p * eye + t * t.adjoint();
    const cmat b = s_e / p * eye + e * e.adjoint();
    // b is positive definite; whiten with its Cholesky factor.
    const Eigen::LLT<cmat> llt(b);
    const cmat l_inv = llt.matrixL().solve(eye);
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(l_inv * a * l_inv.adjoint()));
    cvec v = llt.matrixU().solve(es.eigenvectors().col(n - 1));
    v *= std::sqrt(p) / v.norm();
    const cmat q = v * v.adjoint();
    if ((s_t + quad_form(t, q)) / (s_e + quad_form(e, q)) <= s_t / s_e)
        return cmat::Zero(n, n);
    return q;
}

struct FdZfOptions
{
    double tol = 1e-10;
    int max_iter = 200;
};

struct FdZfResult
{
    CovariancePair q;
    RateSet rates;
    std::vector<double> trace; ///< unclamped R_a + R_b - R_e after each sweep
    int iterations = 0;
};

/// FD-ZF: each Q_i lives in the null space of its own SI channel; exact block updates.
inline FdZfResult baseline_fd_zf(const ChannelSet &ch, const SystemParams &p, const FdZfOptions &opt = {})
{
    p.validate();
    ch.validate(p.n_tx);
    require(p.n_tx >= 2, errc::invalid_argument, "FD-ZF needs at least two antennas");
    const cmat va = null_space_basis(ch.h_aa);
    const cmat vb = null_space_basis(ch.h_bb);
    const cvec ab = va.adjoint() * ch.h_ab, ae = va.adjoint() * ch.h_ae;
    const cvec ba = vb.adjoint() * ch.h_ba, be = vb.adjoint() * ch.h_be;
    const auto r = static_cast<Eigen::Index>(p.n_tx - 1);
    cmat wa = cmat::Zero(r, r), wb = cmat::Zero(r, r);

    auto objective = [&](const cmat &xa, const cmat &xb) {
        const double leak = quad_form(ae, xa) + quad_form(be, xb);
        return std::log2(1 + quad_form(ba, xb) / p.sigma_a2) + std::log2(1 + quad_form(ab, xa) / p.sigma_b2) -
               std::log2(1 + leak / p.sigma_e2);
    };

    FdZfResult res;
    double prev = objective(wa, wb);
    for (int it = 0; it < opt.max_iter; ++it)
    {
        wa = wiretap_covariance(ab, ae, p.sigma_b2, p.sigma_e2 + quad_form(be, wb), p.p_a);
        wb = wiretap_covariance(ba, be, p.sigma_a2, p.sigma_e2 + quad_form(ae, wa), p.p_b);
        const double obj = objective(wa, wb);
        res.trace.push_back(obj);
        ++res.iterations;
        if (obj - prev < opt.tol)
            break;
        prev = obj;
    }
    res.q = {hermitian_part(va * wa * va.adjoint()), hermitian_part(vb * wb * vb.adjoint())};
    res.rates = evaluate_rates(res.q, ch, p);
    return res;
}

struct HdSlot
{
    cmat q;
    double r_link = 0.0; ///< legitimate rate of the slot, bits/s/Hz
    double r_eve = 0.0;  ///< Eve's rate in the slot
    int iterations = 0;
};

struct HdResult
{
    HdSlot a_to_b, b_to_a;
    double ssr = 0.0; ///< 1/2 [R_ab - R_e,a]^+ + 1/2 [R_ba - R_e,b]^+
};

struct HdOptions
{
    double tol = 1e-10;
    int max_iter = 200;
};

/// One half-duplex slot: max log(1 + t^H Q t / s_t) - log(1 + e^H Q e / s_e) by DC
/// iterations on the closed-form subproblem, with M built from Eve only.
inline HdSlot hd_slot(const cvec &t, const cvec &e, double s_t, double s_e, double power, const HdOptions &opt)
{
    require(t.norm() > 0, errc::degenerate_channel, "half-duplex slot with a zero target channel");
    const cmat u = orthonormal_basis({t, e});
    const cvec tt = u.adjoint() * t / std::sqrt(s_t);
    const cvec et = u.adjoint() * e;
    auto value = [&](const cmat &w) { return std::log1p(quad_form(tt, w)) - std::log1p(quad_form(et, w) / s_e); };

    // Start from maximum ratio transmission toward the receiver.
    cmat w = power * tt * tt.adjoint() / tt.squaredNorm();
    HdSlot slot;
    double prev = value(w);
    for (int it = 0; it < opt.max_iter; ++it)
    {
        SubproblemData sp;
        sp.hhat_ab = tt;
        sp.m_mat = et * et.adjoint() / (s_e + quad_form(et, w));
        sp.p_budget = power;
        const cmat next = solve_dc_subproblem(sp).w_star;
        ++slot.iterations;
        const double v = value(next);
        if (v < prev)
            break;
        w = next;
        const bool done = v - prev < opt.tol;
        prev = v;
        if (done)
            break;
    }
    slot.q = hermitian_part(u * w * u.adjoint());
    slot.r_link = std::log2(1 + quad_form(t, slot.q) / s_t);
    slot.r_eve = std::log2(1 + quad_form(e, slot.q) / s_e);
    return slot;
}

inline HdResult baseline_hd(const ChannelSet &ch, const SystemParams &p, const HdOptions &opt = {})
{
    p.validate();
    ch.validate(p.n_tx);
    HdResult r;
    r.a_to_b = hd_slot(ch.h_ab, ch.h_ae, p.sigma_b2, p.sigma_e2, p.p_a, opt);
    r.b_to_a = hd_slot(ch.h_ba, ch.h_be, p.sigma_a2, p.sigma_e2, p.p_b, opt);
    r.ssr = 0.5 * std::max(0.0, r.a_to_b.r_link - r.a_to_b.r_eve) + 0.5 * std::max(0.0, r.b_to_a.r_link - r.b_to_a.r_eve);
    return r;
}

} // namespace fdsec

#endif // FDSEC_BASELINES_HPP
