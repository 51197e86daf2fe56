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
// Several multi-antenna eavesdroppers. The secrecy objective is the worst
// case over Eves, which makes each block update a max-min problem. It is
// solved through its dual over simplex weights gamma: for fixed gamma the
// inner problem is the single-Eve subproblem with M = sum_i gamma_i M_i, and
// g(gamma) is minimized by projected gradient descent.

#ifndef FDSEC_MULTIEVE_HPP
#define FDSEC_MULTIEVE_HPP

#include "adc.hpp"

#include <string>
#include <vector>

namespace fdsec
{

struct Eve
{
    cmat h_ae;         ///< N x L, Alice -> Eve
    cmat h_be;         ///< N x L, Bob -> Eve
    double sigma2 = 1; ///< noise power per Eve antenna

    Eigen::Index antennas() const { return h_ae.cols(); }
};

struct EvePopulation
{
    std::vector<Eve> eves;

    std::size_t size() const { return eves.size(); }

    void validate(int n_tx) const
    {
        require(!eves.empty(), errc::invalid_argument, "at least one eavesdropper is required");
        for (const auto &e : eves)
        {
            require(e.h_ae.rows() == n_tx && e.h_be.rows() == n_tx, errc::dimension_mismatch,
                    "eavesdropper channel row count differs from n_tx");
            require(e.h_ae.cols() >= 1 && e.h_ae.cols() == e.h_be.cols(), errc::dimension_mismatch,
                    "eavesdropper antenna counts are inconsistent");
            require(e.sigma2 > 0, errc::invalid_argument, "eavesdropper noise power must be positive");
        }
    }
};

/// Legitimate channels plus an eavesdropper population.
struct MultiEveChannels
{
    cvec h_ab, h_aa, h_ba, h_bb;
    EvePopulation eves;

    void validate(int n_tx) const
    {
        for (const cvec *h : {&h_ab, &h_aa, &h_ba, &h_bb})
            require(h->size() == n_tx, errc::dimension_mismatch, "channel length differs from n_tx");
        eves.validate(n_tx);
    }

    /// Single-antenna, single-Eve view of an ordinary channel set.
    static MultiEveChannels from_single(const ChannelSet &ch, double sigma_e2)
    {
        MultiEveChannels m{ch.h_ab, ch.h_aa, ch.h_ba, ch.h_bb, {}};
        m.eves.eves.push_back({cmat(ch.h_ae), cmat(ch.h_be), sigma_e2});
        return m;
    }
};

/// log2 det(I + sigma^-2 (H_ae^H Q_a H_ae + H_be^H Q_b H_be)).
inline double rate_eve_i(const CovariancePair &pair, const Eve &eve)
{
    require(pair.q_a.rows() == eve.h_ae.rows() && pair.q_b.rows() == eve.h_be.rows(), errc::dimension_mismatch,
            "covariance dimension does not match eavesdropper channel");
    const auto l = eve.antennas();
    const cmat k = cmat::Identity(l, l) + (eve.h_ae.adjoint() * hermitian_part(pair.q_a) * eve.h_ae +
                                           eve.h_be.adjoint() * hermitian_part(pair.q_b) * eve.h_be) /
                                              eve.sigma2;
    const Eigen::LDLT<cmat> ldlt(hermitian_part(k));
    return ldlt.vectorD().real().array().log().sum() / ln2;
}

struct MultiEveRates
{
    double r_a = 0, r_b = 0;
    std::vector<double> r_e; ///< per Eve
    double ssr = 0;          ///< [r_a + r_b - max_i r_e_i]^+
};

inline MultiEveRates evaluate_multieve_rates(const CovariancePair &pair, const MultiEveChannels &ch,
                                             const SystemParams &p)
{
    ch.validate(p.n_tx);
    const ChannelSet legit{ch.h_ab, cvec::Zero(p.n_tx), ch.h_aa, ch.h_ba, cvec::Zero(p.n_tx), ch.h_bb};
    MultiEveRates r;
    r.r_a = rate_a(pair, legit, p);
    r.r_b = rate_b(pair, legit, p);
    double worst = 0.0;
    for (const auto &e : ch.eves.eves)
    {
        r.r_e.push_back(rate_eve_i(pair, e));
        worst = std::max(worst, r.r_e.back());
    }
    r.ssr = std::max(0.0, r.r_a + r.r_b - worst);
    return r;
}

// ---- reduction ----------------------------------------------------------

struct ReducedMultiEveProblem
{
    cmat u_a, u_b;
    cvec ht_ab, ht_aa, ht_ba, ht_bb;
    std::vector<cmat> ht_ae, ht_be; ///< r_a x L_i and r_b x L_i
    std::vector<double> sigma2;
    SystemParams params;

    int r_a() const { return static_cast<int>(u_a.cols()); }
    int r_b() const { return static_cast<int>(u_b.cols()); }
    std::size_t eve_count() const { return sigma2.size(); }

    ReducedMultiEveProblem mirrored() const
    {
        return {u_b, u_a, ht_ba, ht_bb, ht_ab, ht_aa, ht_be, ht_ae, sigma2, params.mirrored()};
    }
};

/// Basis spans [h_ab, h_aa, all Eve columns]; rank at most min(N, 2 + sum L_i).
inline ReducedMultiEveProblem reduce_multieve(const MultiEveChannels &ch, const SystemParams &p)
{
    p.validate();
    ch.validate(p.n_tx);
    std::vector<cvec> cols_a{ch.h_ab, ch.h_aa}, cols_b{ch.h_ba, ch.h_bb};
    for (const auto &e : ch.eves.eves)
        for (Eigen::Index l = 0; l < e.antennas(); ++l)
        {
            cols_a.emplace_back(e.h_ae.col(l));
            cols_b.emplace_back(e.h_be.col(l));
        }
    ReducedMultiEveProblem rp;
    rp.u_a = orthonormal_basis(std::span<const cvec>(cols_a));
    rp.u_b = orthonormal_basis(std::span<const cvec>(cols_b));
    rp.ht_ab = rp.u_a.adjoint() * ch.h_ab;
    rp.ht_aa = rp.u_a.adjoint() * ch.h_aa;
    rp.ht_ba = rp.u_b.adjoint() * ch.h_ba;
    rp.ht_bb = rp.u_b.adjoint() * ch.h_bb;
    for (const auto &e : ch.eves.eves)
    {
        rp.ht_ae.push_back(rp.u_a.adjoint() * e.h_ae);
        rp.ht_be.push_back(rp.u_b.adjoint() * e.h_be);
        rp.sigma2.push_back(e.sigma2);
    }
    rp.params = p;
    return rp;
}

inline CovariancePair lift(const ReducedCovariancePair &w, const ReducedMultiEveProblem &rp)
{
    require(w.w_a.rows() == rp.r_a() && w.w_b.rows() == rp.r_b(), errc::dimension_mismatch,
            "reduced covariance does not match the basis rank");
    return {rp.u_a * hermitian_part(w.w_a) * rp.u_a.adjoint(), rp.u_b * hermitian_part(w.w_b) * rp.u_b.adjoint()};
}

/// Reduced rates in nats: legitimate rates and every Eve's rate.
struct ReducedMultiEveRatesNats
{
    double r_a = 0, r_b = 0;
    std::vector<double> r_e;

    double worst_eve() const { return r_e.empty() ? 0.0 : *std::max_element(r_e.begin(), r_e.end()); }
    double objective() const { return r_a + r_b - worst_eve(); }
};

inline double reduced_eve_rate_nats(const ReducedCovariancePair &w, const ReducedMultiEveProblem &rp, std::size_t i)
{
    const auto l = rp.ht_ae[i].cols();
    const cmat k = cmat::Identity(l, l) + (rp.ht_ae[i].adjoint() * w.w_a * rp.ht_ae[i] +
                                           rp.ht_be[i].adjoint() * w.w_b * rp.ht_be[i]) /
                                              rp.sigma2[i];
    const Eigen::LDLT<cmat> ldlt(hermitian_part(k));
    return ldlt.vectorD().real().array().log().sum();
}

inline ReducedMultiEveRatesNats reduced_multieve_rates_nats(const ReducedCovariancePair &w,
                                                           const ReducedMultiEveProblem &rp)
{
    const auto &p = rp.params;
    ReducedMultiEveRatesNats r;
    r.r_a = std::log1p(quad_form(rp.ht_ba, w.w_b) / (p.sigma_a2 + p.zeta_a * quad_form(rp.ht_aa, w.w_a)));
    r.r_b = std::log1p(quad_form(rp.ht_ab, w.w_a) / (p.sigma_b2 + p.zeta_b * quad_form(rp.ht_bb, w.w_b)));
    for (std::size_t i = 0; i < rp.eve_count(); ++i)
        r.r_e.push_back(reduced_eve_rate_nats(w, rp, i));
    return r;
}

// ---- subproblem ---------------------------------------------------------

/// Block subproblem max_W min_i [log(1 + hhat^H W hhat) + c_i - Tr(M_i W)].
/// The offsets c_i = (R_a - R_e_i)(W^k) + Tr(M_i W^k) make each branch the
/// exact linearization of that Eve's objective; with all c_i = 0 the problem
/// is the plain weighted form.
struct MultiEveSubproblem
{
    cvec hhat_ab;
    std::vector<cmat> m_i;
    rvec offsets;
    double p_budget = 0.0;
    bool unnormalized = false;

    std::size_t eve_count() const { return m_i.size(); }

    SubproblemData weighted(const rvec &gamma) const
    {
        SubproblemData sp;
        sp.hhat_ab = hhat_ab;
        sp.p_budget = p_budget;
        sp.m_mat = cmat::Zero(hhat_ab.size(), hhat_ab.size());
        for (std::size_t i = 0; i < m_i.size(); ++i)
            sp.m_mat += gamma(static_cast<Eigen::Index>(i)) * m_i[i];
        sp.m_mat = hermitian_part(sp.m_mat);
        return sp;
    }

    /// Per-Eve branch values at W (nats).
    rvec branch_values(const cmat &w) const
    {
        const double common = std::log1p(quad_form(hhat_ab, w));
        rvec v(static_cast<Eigen::Index>(m_i.size()));
        for (std::size_t i = 0; i < m_i.size(); ++i)
            v(static_cast<Eigen::Index>(i)) = common + offsets(static_cast<Eigen::Index>(i)) - (m_i[i] * w).trace().real();
        return v;
    }
};

/// Linearization weight of Eve i for Alice's block at (W_a^k, W_b^k).
inline cmat build_m_i(const ReducedCovariancePair &current, const ReducedMultiEveProblem &rp, std::size_t i)
{
    const auto &p = rp.params;
    const cmat &wa = current.w_a;
    const double c_ba = quad_form(rp.ht_ba, current.w_b);
    const double x = p.zeta_a * quad_form(rp.ht_aa, wa);
    cmat m = (p.zeta_a * c_ba / ((p.sigma_a2 + x + c_ba) * (p.sigma_a2 + x))) * rp.ht_aa * rp.ht_aa.adjoint();
    const cmat &hae = rp.ht_ae[i];
    const cmat &hbe = rp.ht_be[i];
    const auto l = hae.cols();
    const cmat inner = rp.sigma2[i] * cmat::Identity(l, l) + hae.adjoint() * wa * hae + hbe.adjoint() * current.w_b * hbe;
    m += hae * hermitian_part(inner).ldlt().solve(hae.adjoint());
    return hermitian_part(m);
}

inline MultiEveSubproblem build_multieve_subproblem_a(const ReducedCovariancePair &current,
                                                      const ReducedMultiEveProblem &rp)
{
    const auto &p = rp.params;
    require(current.w_a.rows() == rp.r_a() && current.w_b.rows() == rp.r_b(), errc::dimension_mismatch,
            "iterate does not match the reduced problem");
    MultiEveSubproblem sp;
    sp.p_budget = p.p_a;
    sp.hhat_ab = rp.ht_ab / std::sqrt(p.sigma_b2 + p.zeta_b * quad_form(rp.ht_bb, current.w_b));
    sp.unnormalized = quad_form(rp.ht_ba, current.w_b) < 1e-12;
    const auto rates = reduced_multieve_rates_nats(current, rp);
    sp.offsets.resize(static_cast<Eigen::Index>(rp.eve_count()));
    for (std::size_t i = 0; i < rp.eve_count(); ++i)
    {
        sp.m_i.push_back(build_m_i(current, rp, i));
        sp.offsets(static_cast<Eigen::Index>(i)) =
            rates.r_a - rates.r_e[i] + (sp.m_i.back() * current.w_a).trace().real();
    }
    return sp;
}

// ---- simplex ------------------------------------------------------------

struct SimplexWeights
{
    rvec gamma;
};

/// Euclidean projection onto the unit simplex (Michelot's active-set iteration).
inline SimplexWeights project_simplex(const rvec &v)
{
    require(v.size() > 0, errc::invalid_argument, "cannot project an empty vector onto the simplex");
    std::vector<bool> active(static_cast<std::size_t>(v.size()), true);
    double theta = 0.0;
    for (;;)
    {
        double sum = 0.0;
        int count = 0;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            if (active[static_cast<std::size_t>(i)])
            {
                sum += v(i);
                ++count;
            }
        theta = (sum - 1.0) / count;
        bool changed = false;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            if (active[static_cast<std::size_t>(i)] && v(i) - theta <= 0.0)
            {
                active[static_cast<std::size_t>(i)] = false;
                changed = true;
            }
        if (!changed)
            break;
    }
    SimplexWeights w;
    w.gamma = (v.array() - theta).cwiseMax(0.0).matrix();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!active[static_cast<std::size_t>(i)])
            w.gamma(i) = 0.0;
    return w;
}

struct GEvaluation
{
    double value = 0.0; ///< g(gamma), nats
    rvec grad;
    RankOneSolution solution;
};

/// g(gamma) = max_W log(1 + hhat^H W hhat) - sum_i gamma_i (Tr(M_i W) - c_i) and its gradient.
inline GEvaluation g_and_grad(const SimplexWeights &w, const MultiEveSubproblem &sp)
{
    require(w.gamma.size() == static_cast<Eigen::Index>(sp.eve_count()), errc::dimension_mismatch,
            "weight vector length differs from the number of eavesdroppers");
    GEvaluation out;
    out.solution = solve_dc_subproblem(sp.weighted(w.gamma));
    out.grad.resize(w.gamma.size());
    for (std::size_t i = 0; i < sp.eve_count(); ++i)
        out.grad(static_cast<Eigen::Index>(i)) =
            sp.offsets(static_cast<Eigen::Index>(i)) - (sp.m_i[i] * out.solution.w_star).trace().real();
    out.value = std::log1p(quad_form(sp.hhat_ab, out.solution.w_star)) + w.gamma.dot(out.grad);
    return out;
}

struct MultiEveOptions
{
    double tol = 1e-9;   ///< projected-gradient norm
    int max_iter = 2000;
    double armijo = 1e-4;
    double shrink = 0.5;
    double initial_step = 1.0;
};

struct MultiEveSolution
{
    SimplexWeights weights;
    RankOneSolution solution;
    double value = 0.0; ///< g(gamma*), nats
    int iterations = 0;
    bool converged = false; ///< false: best iterate returned after max_iter
};

inline MultiEveSolution solve_multieve_subproblem(const MultiEveSubproblem &sp, const MultiEveOptions &opt = {})
{
    const auto count = static_cast<Eigen::Index>(sp.eve_count());
    require(count >= 1, errc::invalid_argument, "no eavesdroppers in the subproblem");
    SimplexWeights w{rvec::Constant(count, 1.0 / double(count))};
    auto current = g_and_grad(w, sp);

    MultiEveSolution out;
    out.weights = w;
    out.solution = current.solution;
    out.value = current.value;
    if (count == 1)
    {
        out.converged = true;
        return out;
    }

    double step = opt.initial_step;
    for (int k = 1; k <= opt.max_iter; ++k)
    {
        out.iterations = k;
        const rvec mapped = project_simplex(w.gamma - current.grad).gamma;
        if ((w.gamma - mapped).norm() < opt.tol)
        {
            out.converged = true;
            break;
        }
        // Armijo backtracking along the projection arc.
        step = std::min(opt.initial_step, step / opt.shrink);
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt)
        {
            SimplexWeights trial = project_simplex(w.gamma - step * current.grad);
            const rvec delta = trial.gamma - w.gamma;
            auto next = g_and_grad(trial, sp);
            if (next.value <= current.value + opt.armijo * current.grad.dot(delta))
            {
                w = trial;
                current = next;
                accepted = true;
                break;
            }
            step *= opt.shrink;
        }
        if (current.value <= out.value)
        {
            out.weights = w;
            out.solution = current.solution;
            out.value = current.value;
        }
        if (!accepted)
            break; // no descent at machine precision
    }
    if (!out.converged)
        out.converged = (out.weights.gamma - project_simplex(out.weights.gamma - current.grad).gamma).norm() < 1e-6;
    return out;
}

// ---- outer loop ---------------------------------------------------------

struct MultiEveAdcResult
{
    ReducedCovariancePair w;
    AdcTrace trace; ///< R_e column holds the worst Eve's rate
    int iterations = 0;
    bool converged = false;
    double objective = 0.0; ///< bits, min over Eves of R_a + R_b - R_e_i
    std::vector<rvec> weights_a, weights_b; ///< gamma* of every block update
};

inline ReducedCovariancePair default_init(const ReducedMultiEveProblem &rp)
{
    const int ra = rp.r_a(), rb = rp.r_b();
    return {cmat::Identity(ra, ra) * (rp.params.p_a / ra), cmat::Identity(rb, rb) * (rp.params.p_b / rb)};
}

inline MultiEveAdcResult multieve_adc_solve(const ReducedMultiEveProblem &rp, const ReducedCovariancePair &init,
                                            const AdcOptions &opt = {}, const MultiEveOptions &inner = {})
{
    require(init.w_a.rows() == rp.r_a() && init.w_b.rows() == rp.r_b(), errc::dimension_mismatch,
            "initial point does not match the reduced problem");
    MultiEveAdcResult res;
    res.w = {hermitian_part(init.w_a), hermitian_part(init.w_b)};
    const auto mirror = rp.mirrored();

    auto record = [&](int iter) {
        const auto r = reduced_multieve_rates_nats(res.w, rp);
        AdcIterate it;
        it.iter = iter;
        it.r_a = r.r_a / ln2;
        it.r_b = r.r_b / ln2;
        it.r_e = r.worst_eve() / ln2;
        it.objective = r.objective() / ln2;
        return it;
    };
    // Branch-wise surrogate at W, minimized over Eves, in bits.
    auto surrogate = [](const MultiEveSubproblem &sp, const cmat &w, double concave_shift) {
        return (sp.branch_values(w).minCoeff() + concave_shift) / ln2;
    };
    res.trace.iterates.push_back(record(0));
    res.trace.iterates.back().half_objective = res.trace.iterates.back().objective;

    for (int k = 1; k <= opt.max_iter; ++k)
    {
        const double previous = res.trace.iterates.back().objective;
        AdcIterate it;

        for (int block = 0; block < 2; ++block)
        {
            const bool alice = block == 0;
            const auto anchor = alice ? res.w : res.w.mirrored();
            const auto &prob = alice ? rp : mirror;
            const auto sp = build_multieve_subproblem_a(anchor, prob);
            const auto sol = solve_multieve_subproblem(sp, inner);
            // R_b(W_a) = log(1 + hhat^H W_a hhat) + log(sigma_b^2 + zeta_b c_bb) - log(sigma_b^2 + zeta_b c_bb).
            const double f_new = surrogate(sp, sol.solution.w_star, 0.0);
            const double f_old = surrogate(sp, anchor.w_a, 0.0);
            const bool take = f_new >= f_old;
            if (alice)
            {
                if (take)
                    res.w.w_a = sol.solution.w_star;
                res.weights_a.push_back(sol.weights.gamma);
                it.case_a = sol.solution.case_tag;
                it.fallback_a = sp.unnormalized;
                it.half_objective = reduced_multieve_rates_nats(res.w, rp).objective() / ln2;
            }
            else
            {
                if (take)
                    res.w.w_b = sol.solution.w_star;
                res.weights_b.push_back(sol.weights.gamma);
                it.case_b = sol.solution.case_tag;
                it.fallback_b = sp.unnormalized;
            }
        }

        const auto rec = record(k);
        it.iter = k;
        it.objective = rec.objective;
        it.r_a = rec.r_a;
        it.r_b = rec.r_b;
        it.r_e = rec.r_e;
        res.trace.iterates.push_back(it);
        res.iterations = k;
        if (it.objective - previous < opt.tol)
        {
            res.converged = true;
            break;
        }
    }
    res.objective = res.trace.iterates.back().objective;
    return res;
}

} // namespace fdsec

#endif // FDSEC_MULTIEVE_HPP
