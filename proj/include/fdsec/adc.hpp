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
// Alternating difference-of-concave (ADC) solver.
//
// With W_b fixed, the objective in W_a is R_b (concave) plus R_a - R_e
// (convex). Linearizing the convex part at the current iterate gives the
// per-block subproblem
//
//     maximize  log(1 + hhat^H W hhat) - Tr(M W)   s.t.  Tr(W) <= P, W >= 0,
//
// whose optimum is rank one: W = kappa (M + lambda I)^{-1} hhat hhat^H (M + lambda I)^{-1}
// with the dual multiplier lambda found by bisection on the power constraint.
// Subproblems are posed in nats; rates leave this module in bits/s/Hz.

#ifndef FDSEC_ADC_HPP
#define FDSEC_ADC_HPP

#include "reduction.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace fdsec
{

struct SubproblemData
{
    cvec hhat_ab;            ///< effective target channel
    cmat m_mat;              ///< linearization weight, Hermitian PSD
    double p_budget = 0.0;
    cvec hhat_aa;            ///< normalized SI channel (raw sqrt(zeta) h_aa under the fallback)
    cvec hhat_ae;            ///< normalized Eve channel
    double sigmahat_a2 = 0.0;
    bool unnormalized = false; ///< the reverse link carried no power; reverse-link normalization skipped

    int dim() const { return static_cast<int>(hhat_ab.size()); }
};

/// Value of log(1 + hhat^H W hhat) - Tr(M W), in nats.
inline double subproblem_objective(const SubproblemData &sp, const cmat &w)
{
    return std::log1p(quad_form(sp.hhat_ab, w)) - (sp.m_mat * w).trace().real();
}

/// Linearization data for Alice's block update at (W_a^k, W_b^k).
inline SubproblemData build_subproblem_a(const ReducedCovariancePair &current, const ReducedProblem &rp)
{
    const auto &p = rp.params;
    const cmat &wa = current.w_a;
    const cmat &wb = current.w_b;
    require(wa.rows() == rp.r_a() && wb.rows() == rp.r_b(), errc::dimension_mismatch,
            "iterate does not match the reduced problem");

    const double c_ba = quad_form(rp.ht_ba, wb);
    const double c_bb = quad_form(rp.ht_bb, wb);
    const double c_be = quad_form(rp.ht_be, wb);

    SubproblemData sp;
    sp.p_budget = p.p_a;
    sp.hhat_ab = rp.ht_ab / std::sqrt(p.sigma_b2 + p.zeta_b * c_bb);
    sp.hhat_ae = rp.ht_ae / std::sqrt(p.sigma_e2 + c_be);

    const double eve_q = quad_form(sp.hhat_ae, wa);
    cmat m = sp.hhat_ae * sp.hhat_ae.adjoint() / (1.0 + eve_q);

    if (c_ba >= 1e-12)
    {
        sp.hhat_aa = std::sqrt(p.zeta_a / c_ba) * rp.ht_aa;
        sp.sigmahat_a2 = p.sigma_a2 / c_ba;
        const double si_q = quad_form(sp.hhat_aa, wa);
        m += sp.hhat_aa * sp.hhat_aa.adjoint() / ((1.0 + sp.sigmahat_a2 + si_q) * (sp.sigmahat_a2 + si_q));
    }
    else
    {
        // Same gradient without dividing by the (vanishing) received power.
        sp.unnormalized = true;
        sp.hhat_aa = std::sqrt(p.zeta_a) * rp.ht_aa;
        sp.sigmahat_a2 = p.sigma_a2;
        const double x = p.zeta_a * quad_form(rp.ht_aa, wa);
        const double w = c_ba / ((p.sigma_a2 + x + c_ba) * (p.sigma_a2 + x));
        m += w * sp.hhat_aa * sp.hhat_aa.adjoint();
    }
    sp.m_mat = hermitian_part(m);
    return sp;
}

/// Bob's block update at (W_a^{k+1}, W_b^k), posed through the mirrored problem.
inline SubproblemData build_subproblem_b(const ReducedCovariancePair &current, const ReducedProblem &rp)
{
    return build_subproblem_a(current.mirrored(), rp.mirrored());
}

enum class SubproblemCase
{
    out_of_range, ///< hhat is not in range(M): full power, lambda > 0
    in_range      ///< hhat in range(M): solved on the economy eigenbasis of M
};

inline const char *to_string(SubproblemCase c)
{
    return c == SubproblemCase::out_of_range ? "out_of_range" : "in_range";
}

struct RankOneSolution
{
    cmat w_star;
    double lambda_star = 0.0;
    double kappa = 0.0;
    SubproblemCase case_tag = SubproblemCase::out_of_range;
    cmat f_mat;      ///< in_range only: economy eigenbasis of M
    rmat sigma_mat;  ///< in_range only: diagonal of nonzero eigenvalues, M = F Sigma F^H
    cmat x_star;     ///< in_range only: W* = F X* F^H
    double objective = 0.0; ///< nats
    int bisection_steps = 0;
};

namespace detail
{
/// The rank-one family W(lambda) written in the eigenbasis of M.
struct SpectralForm
{
    rvec d;      ///< eigenvalues used (clamped at zero)
    rvec c_abs2; ///< |v_i^H hhat|^2
    cmat v;      ///< eigenvectors used
    cvec c;      ///< v_i^H hhat

    double b(double lambda) const { return (c_abs2.array() / (d.array() + lambda)).sum(); }

    double kappa(double lambda) const
    {
        const double bl = b(lambda);
        return bl > 1.0 ? (1.0 - 1.0 / bl) / bl : 0.0;
    }

    double trace(double lambda) const
    {
        return kappa(lambda) * (c_abs2.array() / (d.array() + lambda).square()).sum();
    }

    cvec direction(double lambda) const { return v * (c.array() / (d.array() + lambda)).matrix(); }
};

struct SpectralSplit
{
    SpectralForm full;
    SpectralForm range;
    double residual = 0.0; ///< norm of hhat outside range(M)
};

inline SpectralSplit spectral_split(const SubproblemData &sp)
{
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(sp.m_mat));
    const rvec d = es.eigenvalues().cwiseMax(0.0);
    const cmat &v = es.eigenvectors();
    const cvec c = v.adjoint() * sp.hhat_ab;
    const double dmax = d.size() ? d.maxCoeff() : 0.0;
    const double rank_tol = 1e-12 * dmax;

    SpectralSplit s;
    s.full = {d, c.cwiseAbs2(), v, c};
    std::vector<Eigen::Index> in_range;
    double outside = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
    {
        if (dmax > 0.0 && d(i) > rank_tol)
            in_range.push_back(i);
        else
            outside += std::norm(c(i));
    }
    s.residual = std::sqrt(outside);
    const auto k = static_cast<Eigen::Index>(in_range.size());
    s.range.d.resize(k);
    s.range.c.resize(k);
    s.range.v.resize(v.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j)
    {
        s.range.d(j) = d(in_range[j]);
        s.range.c(j) = c(in_range[j]);
        s.range.v.col(j) = v.col(in_range[j]);
    }
    s.range.c_abs2 = s.range.c.cwiseAbs2();
    return s;
}
} // namespace detail

/// Relative trace tolerance of the dual bisection. Tighter than the 1e-8
/// needed for feasibility so that ADC half-steps never lose objective to
/// bisection error.
inline constexpr double bisection_rel_tol = 1e-12;

struct BisectionResult
{
    double lambda_star = 0.0;
    cmat w_star;
    int steps = 0;
};

/// Dual bisection. out_of_range: lambda in (0, |hhat|^2) with Tr W = P.
/// in_range: lambda in [0, |F^H hhat|^2] with lambda (Tr W - P) = 0.
/// The trace is nonincreasing in lambda; ties go to the smaller lambda.
inline BisectionResult bisect_lambda(const SubproblemData &sp, SubproblemCase which)
{
    const auto split = detail::spectral_split(sp);
    const auto &form = which == SubproblemCase::out_of_range ? split.full : split.range;
    const double p = sp.p_budget;

    BisectionResult out;
    auto finish = [&](double lambda) {
        out.lambda_star = lambda;
        const cvec u = form.direction(lambda);
        out.w_star = form.kappa(lambda) * u * u.adjoint();
        return out;
    };

    if (form.d.size() == 0 || form.c_abs2.sum() == 0.0)
    {
        out.w_star = cmat::Zero(sp.dim(), sp.dim());
        return out;
    }

    double lo = 0.0;
    double hi = form.c_abs2.sum();
    if (which == SubproblemCase::in_range)
    {
        if (form.trace(0.0) <= p * (1 + 1e-12))
            return finish(0.0);
    }
    // Bracketing precondition: trace straddles P on (lo, hi].
    if (!(form.trace(hi) <= p))
        throw error(errc::bracketing_failure, "trace at the upper bracket exceeds the budget");

    for (out.steps = 1; out.steps <= 200; ++out.steps)
    {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double t = form.trace(mid);
        if (std::abs(t - p) < bisection_rel_tol * p)
            return finish(mid);
        if (t > p)
            lo = mid;
        else
            hi = mid;
    }
    // Interval collapsed to adjacent doubles.
    if (std::abs(form.trace(hi) - p) < 1e-8 * p)
        return finish(hi);
    throw error(errc::bracketing_failure,
                "bisection failed: lambda in [" + format_number(lo) + ", " + format_number(hi) +
                    "], trace(lo) = " + format_number(form.trace(lo)) + ", trace(hi) = " +
                    format_number(form.trace(hi)) + ", budget = " + format_number(p));
}

/// Global optimum of the rank-one subproblem.
inline RankOneSolution solve_dc_subproblem(const SubproblemData &sp)
{
    require(sp.hhat_ab.size() > 0 && sp.m_mat.rows() == sp.hhat_ab.size(), errc::dimension_mismatch,
            "subproblem dimensions disagree");
    require(sp.p_budget > 0, errc::invalid_argument, "power budget must be positive");
    const double hnorm = sp.hhat_ab.norm();
    require(hnorm > 0, errc::degenerate_channel, "effective target channel is zero");

    const auto split = detail::spectral_split(sp);
    RankOneSolution sol;
    sol.case_tag = split.residual > 1e-9 * hnorm ? SubproblemCase::out_of_range : SubproblemCase::in_range;

    const auto bis = bisect_lambda(sp, sol.case_tag);
    sol.lambda_star = bis.lambda_star;
    sol.bisection_steps = bis.steps;
    sol.w_star = hermitian_part(bis.w_star);
    const auto &form = sol.case_tag == SubproblemCase::out_of_range ? split.full : split.range;
    sol.kappa = form.d.size() ? form.kappa(sol.lambda_star) : 0.0;
    if (sol.case_tag == SubproblemCase::in_range)
    {
        sol.f_mat = split.range.v;
        sol.sigma_mat = split.range.d.asDiagonal();
        sol.x_star = hermitian_part(sol.f_mat.adjoint() * sol.w_star * sol.f_mat);
    }
    sol.objective = subproblem_objective(sp, sol.w_star);
    return sol;
}

/// KKT residuals of a subproblem solution, with Z = M + lambda I - hhat hhat^H / (1 + hhat^H W hhat)
/// the multiplier of W >= 0.
struct KktReport
{
    double stationarity = 0.0;    ///< ||Z W||_F
    double primal = 0.0;          ///< budget excess and negative eigenvalues of W
    double dual = 0.0;            ///< negative eigenvalues of Z, negative lambda
    double complementarity = 0.0; ///< |lambda (Tr W - P)| + |Tr(Z W)|
    double rank_ratio = 0.0;      ///< second largest / largest eigenvalue of W

    double worst() const { return std::max({stationarity, primal, dual, complementarity}); }
};

inline KktReport kkt_residuals(const SubproblemData &sp, const RankOneSolution &sol)
{
    const auto n = sp.dim();
    const cmat &w = sol.w_star;
    const double s = quad_form(sp.hhat_ab, w);
    const cmat z = hermitian_part(sp.m_mat + sol.lambda_star * cmat::Identity(n, n) -
                                  sp.hhat_ab * sp.hhat_ab.adjoint() / (1.0 + s));
    KktReport r;
    r.stationarity = (z * w).norm();
    const rvec wev = hermitian_eigenvalues(w);
    r.primal = std::max({0.0, trace_real(w) - sp.p_budget, -wev.minCoeff()});
    r.dual = std::max({0.0, -min_eigenvalue(z), -sol.lambda_star});
    r.complementarity = std::abs(sol.lambda_star * (trace_real(w) - sp.p_budget)) + std::abs((z * w).trace().real());
    const double top = wev.maxCoeff();
    r.rank_ratio = (n > 1 && top > 0) ? std::max(wev(n - 2), 0.0) / top : 0.0;
    return r;
}

// ---- surrogate and stationarity ------------------------------------------

/// Alice's DC surrogate f_a(W; W^k) in nats: concave part kept, convex part linearized.
inline double surrogate_a(const cmat &w_a, const ReducedCovariancePair &anchor, const ReducedProblem &rp,
                          const SubproblemData &sp)
{
    const auto at = reduced_rates_nats(anchor, rp);
    const double concave_now = reduced_rates_nats({w_a, anchor.w_b}, rp).r_b;
    return concave_now + at.r_a - at.r_e - (sp.m_mat * (w_a - anchor.w_a)).trace().real();
}

inline double surrogate_a(const cmat &w_a, const ReducedCovariancePair &anchor, const ReducedProblem &rp)
{
    return surrogate_a(w_a, anchor, rp, build_subproblem_a(anchor, rp));
}

/// Gradient of R_a + R_b - R_e (nats) with respect to W_a.
inline cmat objective_gradient_a(const ReducedCovariancePair &w, const ReducedProblem &rp)
{
    const auto &p = rp.params;
    const double denom = p.sigma_b2 + p.zeta_b * quad_form(rp.ht_bb, w.w_b) + quad_form(rp.ht_ab, w.w_a);
    const cmat concave = rp.ht_ab * rp.ht_ab.adjoint() / denom;
    return hermitian_part(concave - build_subproblem_a(w, rp).m_mat);
}

/// Projected-gradient stationarity measure of the reduced problem.
inline double stationarity_residual(const ReducedCovariancePair &w, const ReducedProblem &rp)
{
    const cmat ga = objective_gradient_a(w, rp);
    const cmat gb = objective_gradient_a(w.mirrored(), rp.mirrored());
    const double ra = (w.w_a - project_psd_trace(w.w_a + ga, rp.params.p_a)).norm();
    const double rb = (w.w_b - project_psd_trace(w.w_b + gb, rp.params.p_b)).norm();
    return std::hypot(ra, rb);
}

// ---- outer loop -----------------------------------------------------------

struct AdcIterate
{
    int iter = 0;
    double objective = 0.0; ///< bits/s/Hz, unclamped reduced objective
    double f_a = 0.0;       ///< surrogate value after the W_a update (bits)
    double f_b = 0.0;       ///< surrogate value after the W_b update (bits)
    double r_a = 0.0, r_b = 0.0, r_e = 0.0;
    double half_objective = 0.0; ///< objective after the W_a update only
    double stationarity = 0.0;
    SubproblemCase case_a = SubproblemCase::out_of_range;
    SubproblemCase case_b = SubproblemCase::out_of_range;
    bool fallback_a = false, fallback_b = false;
};

struct AdcTrace
{
    std::vector<AdcIterate> iterates; ///< entry 0 is the initial point

    std::vector<double> objectives() const
    {
        std::vector<double> v;
        for (const auto &it : iterates)
            v.push_back(it.objective);
        return v;
    }

    /// CSV with columns iter,objective,R_a,R_b,R_e.
    void write_csv(std::ostream &os) const
    {
        os << "iter,objective,R_a,R_b,R_e\n";
        for (const auto &it : iterates)
            os << it.iter << ',' << format_number(it.objective) << ',' << format_number(it.r_a) << ','
               << format_number(it.r_b) << ',' << format_number(it.r_e) << '\n';
    }
};

struct AdcOptions
{
    double tol = 1e-6;               ///< objective improvement over one outer cycle (bits)
    int max_iter = 100;
    double stationarity_tol = 1e-4;
};

struct AdcResult
{
    ReducedCovariancePair w;
    AdcTrace trace;
    int iterations = 0;
    bool converged = false;
    double stationarity = 0.0;
    double objective = 0.0; ///< bits/s/Hz
};

/// W_i = (P_i / r_i) I.
inline ReducedCovariancePair default_init(const ReducedProblem &rp)
{
    const int ra = rp.r_a(), rb = rp.r_b();
    return {cmat::Identity(ra, ra) * (rp.params.p_a / ra), cmat::Identity(rb, rb) * (rp.params.p_b / rb)};
}

inline AdcResult adc_solve(const ReducedProblem &rp, const ReducedCovariancePair &init, const AdcOptions &opt = {})
{
    require(init.w_a.rows() == rp.r_a() && init.w_b.rows() == rp.r_b(), errc::dimension_mismatch,
            "initial point does not match the reduced problem");
    require(trace_real(init.w_a) <= rp.params.p_a * (1 + 1e-8) && trace_real(init.w_b) <= rp.params.p_b * (1 + 1e-8),
            errc::invalid_argument, "initial point exceeds the power budget");

    AdcResult res;
    res.w = {hermitian_part(init.w_a), hermitian_part(init.w_b)};

    auto record = [&](int iter) {
        AdcIterate it;
        it.iter = iter;
        const auto r = reduced_rates(res.w, rp);
        it.objective = r.ssr;
        it.r_a = r.r_a;
        it.r_b = r.r_b;
        it.r_e = r.r_e;
        return it;
    };
    {
        auto it0 = record(0);
        it0.half_objective = it0.objective;
        it0.f_a = it0.f_b = it0.objective;
        it0.stationarity = stationarity_residual(res.w, rp);
        res.trace.iterates.push_back(it0);
    }

    const auto mirror = rp.mirrored();
    for (int k = 1; k <= opt.max_iter; ++k)
    {
        const double previous = res.trace.iterates.back().objective;

        const auto anchor_a = res.w;
        const auto sp_a = build_subproblem_a(anchor_a, rp);
        const auto sol_a = solve_dc_subproblem(sp_a);
        double f_a = surrogate_a(sol_a.w_star, anchor_a, rp, sp_a) / ln2;
        const double f_a_anchor = surrogate_a(anchor_a.w_a, anchor_a, rp, sp_a) / ln2;
        if (f_a >= f_a_anchor)
            res.w.w_a = sol_a.w_star;
        else
            f_a = f_a_anchor; // round-off left the anchor ahead; keep it
        const double half = reduced_objective(res.w, rp);

        const auto anchor_b = res.w.mirrored();
        const auto sp_b = build_subproblem_a(anchor_b, mirror);
        const auto sol_b = solve_dc_subproblem(sp_b);
        double f_b = surrogate_a(sol_b.w_star, anchor_b, mirror, sp_b) / ln2;
        const double f_b_anchor = surrogate_a(anchor_b.w_a, anchor_b, mirror, sp_b) / ln2;
        if (f_b >= f_b_anchor)
            res.w.w_b = sol_b.w_star;
        else
            f_b = f_b_anchor;

        auto it = record(k);
        it.f_a = f_a;
        it.f_b = f_b;
        it.half_objective = half;
        it.case_a = sol_a.case_tag;
        it.case_b = sol_b.case_tag;
        it.fallback_a = sp_a.unnormalized;
        it.fallback_b = sp_b.unnormalized;
        it.stationarity = stationarity_residual(res.w, rp);
        res.trace.iterates.push_back(it);
        res.iterations = k;

        if (it.objective - previous < opt.tol && it.stationarity < opt.stationarity_tol)
        {
            res.converged = true;
            break;
        }
    }
    res.objective = res.trace.iterates.back().objective;
    res.stationarity = res.trace.iterates.back().stationarity;
    return res;
}

inline AdcResult adc_solve(const ReducedProblem &rp, const ReducedCovariancePair &init, double tol, int max_iter)
{
    AdcOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    return adc_solve(rp, init, opt);
}

/// Reduce, solve from the isotropic start, lift: the FD-DC design.
struct FdDcResult
{
    CovariancePair q;
    RateSet rates;
    AdcResult adc;
};

inline FdDcResult solve_fd_dc(const ChannelSet &ch, const SystemParams &p, const AdcOptions &opt = {})
{
    const auto rp = reduce(ch, p);
    FdDcResult out;
    out.adc = adc_solve(rp, default_init(rp), opt);
    out.q = lift(out.adc.w, rp);
    out.rates = evaluate_rates(out.q, ch, p);
    return out;
}

} // namespace fdsec

#endif // FDSEC_ADC_HPP
