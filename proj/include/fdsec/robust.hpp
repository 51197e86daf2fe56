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
// Outage-constrained design when Eve's channels are only known through
// estimates of their first and second moments. The worst-case outage over the
// moment ambiguity set is bounded through its Lagrangian dual, an S-procedure
// and a change of variables mu = 1 / mu_bar, which yields LMIs jointly convex
// in (Q, nu_e, Gamma, Phi, alpha, mu). The remaining nonconvexity sits in the
// objective phi1 - phi2 and is handled by DC iterations.

#ifndef FDSEC_ROBUST_HPP
#define FDSEC_ROBUST_HPP

#include "adc.hpp"
#include "conic.hpp"
#include "model.hpp"
#include "rng.hpp"

#include <array>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fdsec
{

// ---- moment model ---------------------------------------------------------

struct MomentModel
{
    cvec xi_a, xi_b;       ///< mean estimates
    cmat omega_a, omega_b; ///< second-moment estimates
    double tau_1a = 0.0, tau_1b = 0.0;
    double tau_2a = 0.0, tau_2b = 0.0;
    double epsilon = 0.05;

    int n() const { return static_cast<int>(xi_a.size()); }

    void validate(int n_tx) const
    {
        require(xi_a.size() == n_tx && xi_b.size() == n_tx && omega_a.rows() == n_tx && omega_a.cols() == n_tx &&
                    omega_b.rows() == n_tx && omega_b.cols() == n_tx,
                errc::dimension_mismatch, "moment model does not match n_tx");
        require(tau_1a >= 0 && tau_1b >= 0 && tau_2a >= 0 && tau_2b >= 0, errc::invalid_argument,
                "uncertainty radii must be nonnegative");
        require(epsilon > 0 && epsilon < 1, errc::invalid_argument, "epsilon must lie in (0,1)");
        for (int k = 0; k < 2; ++k)
        {
            const cmat &om = k == 0 ? omega_a : omega_b;
            const cvec &xi = k == 0 ? xi_a : xi_b;
            require(max_hermitian_deviation(om) < 1e-10, errc::invalid_argument, "second moment is not Hermitian");
            require(min_eigenvalue(om - xi * xi.adjoint()) >= -1e-9, errc::invalid_argument,
                    "second moment does not dominate the mean outer product");
        }
    }

    /// Equal moments for both Eve links: xi = c (1 + j) 1_N, Omega = xi xi^H + rho I.
    static MomentModel symmetric(int n_tx, double mean_scale, double rho, double tau1, double tau2, double epsilon)
    {
        MomentModel m;
        m.xi_a = cvec::Constant(n_tx, cplx(mean_scale, mean_scale));
        m.xi_b = m.xi_a;
        m.omega_a = m.xi_a * m.xi_a.adjoint() + rho * cmat::Identity(n_tx, n_tx);
        m.omega_b = m.omega_a;
        m.tau_1a = m.tau_1b = tau1;
        m.tau_2a = m.tau_2b = tau2;
        m.epsilon = epsilon;
        return m;
    }
};

struct AmbiguityConstants
{
    cmat psi_a, psi_b;       ///< (N+1) x (N+1)
    cmat xi_mat_a, xi_mat_b; ///< 2N x 2N
};

inline AmbiguityConstants build_ambiguity(const MomentModel &mm)
{
    const int n = mm.n();
    auto psi = [n](double tau, const cvec &xi) {
        cmat m = cmat::Zero(n + 1, n + 1);
        m.topLeftCorner(n, n) = tau * cmat::Identity(n, n);
        m.topRightCorner(n, 1) = -xi;
        m.bottomLeftCorner(1, n) = -xi.adjoint();
        m(n, n) = tau;
        return m;
    };
    auto xim = [n](double tau, const cmat &om) {
        cmat m = cmat::Zero(2 * n, 2 * n);
        m.topLeftCorner(n, n) = tau * cmat::Identity(n, n);
        m.topRightCorner(n, n) = -om;
        m.bottomLeftCorner(n, n) = -om;
        m.bottomRightCorner(n, n) = tau * cmat::Identity(n, n);
        return m;
    };
    return {psi(mm.tau_1a, mm.xi_a), psi(mm.tau_1b, mm.xi_b), xim(mm.tau_2a, mm.omega_a), xim(mm.tau_2b, mm.omega_b)};
}

// ---- DC split of the objective ---------------------------------------------

namespace detail
{
inline double own_interference_a(const cmat &q_a, const ChannelSet &ch, const SystemParams &p)
{
    return p.sigma_a2 + p.zeta_a * quad_form(ch.h_aa, q_a);
}

inline double own_interference_b(const cmat &q_b, const ChannelSet &ch, const SystemParams &p)
{
    return p.sigma_b2 + p.zeta_b * quad_form(ch.h_bb, q_b);
}
} // namespace detail

inline double phi1_nats(const cmat &q_a, const cmat &q_b, const ChannelSet &ch, const SystemParams &p)
{
    return std::log(detail::own_interference_a(q_a, ch, p) + quad_form(ch.h_ba, q_b)) +
           std::log(detail::own_interference_b(q_b, ch, p) + quad_form(ch.h_ab, q_a));
}

inline double phi2_nats(const cmat &q_a, const cmat &q_b, double nu_e, const ChannelSet &ch, const SystemParams &p)
{
    require(nu_e > -1.0, errc::invalid_argument, "nu_e must exceed -1");
    return std::log1p(nu_e) + std::log(detail::own_interference_a(q_a, ch, p)) +
           std::log(detail::own_interference_b(q_b, ch, p));
}

/// phi1 in bits/s/Hz.
inline double phi1(const cmat &q_a, const cmat &q_b, const ChannelSet &ch, const SystemParams &p)
{
    return phi1_nats(q_a, q_b, ch, p) / ln2;
}

/// phi2 in bits/s/Hz.
inline double phi2(const cmat &q_a, const cmat &q_b, double nu_e, const ChannelSet &ch, const SystemParams &p)
{
    return phi2_nats(q_a, q_b, nu_e, ch, p) / ln2;
}

/// R_a + R_b - log2(1 + nu_e), evaluated directly from the rate formulas.
inline double robust_objective(const cmat &q_a, const cmat &q_b, double nu_e, const ChannelSet &ch,
                               const SystemParams &p)
{
    const CovariancePair q{q_a, q_b};
    return rate_a(q, ch, p) + rate_b(q, ch, p) - std::log2(1.0 + nu_e);
}

struct RobustAnchor
{
    cmat q_a, q_b;
    double nu_e = 0.0;
};

/// First-order expansion of phi2 (nats) at an anchor.
struct LinearizedPhi2
{
    RobustAnchor anchor;
    double value = 0.0; ///< phi2 at the anchor, nats
    cmat grad_a, grad_b;
    double grad_nu = 0.0;

    double eval(const cmat &q_a, const cmat &q_b, double nu_e) const
    {
        return value + ((q_a - anchor.q_a) * grad_a).trace().real() + ((q_b - anchor.q_b) * grad_b).trace().real() +
               grad_nu * (nu_e - anchor.nu_e);
    }
};

inline LinearizedPhi2 linearize_phi2(const RobustAnchor &at, const ChannelSet &ch, const SystemParams &p)
{
    LinearizedPhi2 l;
    l.anchor = at;
    l.value = phi2_nats(at.q_a, at.q_b, at.nu_e, ch, p);
    l.grad_a = p.zeta_a * ch.h_aa * ch.h_aa.adjoint() / detail::own_interference_a(at.q_a, ch, p);
    l.grad_b = p.zeta_b * ch.h_bb * ch.h_bb.adjoint() / detail::own_interference_b(at.q_b, ch, p);
    l.grad_nu = 1.0 / (1.0 + at.nu_e);
    return l;
}

// ---- variables and audit ----------------------------------------------------

struct RobustVariables
{
    cmat q_a, q_b;
    double nu_e = 0.0;
    double mu = 0.0;
    double alpha_a = 0.0, alpha_b = 0.0;
    cmat gamma_blk_a, gamma_blk_b; ///< [[S, lambda], [lambda^H, theta]]
    cmat phi_blk_a, phi_blk_b;     ///< [[A, B], [B, C]]

    int n() const { return static_cast<int>(q_a.rows()); }
    cvec lambda_a() const { return gamma_blk_a.topRightCorner(n(), 1); }
    cvec lambda_b() const { return gamma_blk_b.topRightCorner(n(), 1); }
    cmat b_a() const { return phi_blk_a.topRightCorner(n(), n()); }
    cmat b_b() const { return phi_blk_b.topRightCorner(n(), n()); }
};

namespace detail
{
/// The two big block matrices, both required to be NSD.
inline cmat robust_lmi(const RobustVariables &v, double corner, bool with_q)
{
    const int n = v.n();
    cmat m = cmat::Zero(2 * n + 1, 2 * n + 1);
    m.topLeftCorner(n, n) = 2.0 * v.b_a() + (with_q ? v.q_a : cmat::Zero(n, n));
    m.block(n, n, n, n) = 2.0 * v.b_b() + (with_q ? v.q_b : cmat::Zero(n, n));
    m.block(0, 2 * n, n, 1) = v.lambda_a();
    m.block(n, 2 * n, n, 1) = v.lambda_b();
    m.block(2 * n, 0, 1, n) = v.lambda_a().adjoint();
    m.block(2 * n, n, 1, n) = v.lambda_b().adjoint();
    m(2 * n, 2 * n) = corner;
    return m;
}
} // namespace detail

inline cmat robust_lmi1(const RobustVariables &v)
{
    return detail::robust_lmi(v, -(v.alpha_a + v.alpha_b), false);
}

inline cmat robust_lmi2(const RobustVariables &v, const SystemParams &p)
{
    return detail::robust_lmi(v, v.mu - v.alpha_a - v.alpha_b - p.sigma_e2 * v.nu_e, true);
}

/// sum_i Tr(Gamma_i Psi_i + Phi_i Xi_i) + alpha_i
inline double ambiguity_budget_lhs(const RobustVariables &v, const AmbiguityConstants &amb)
{
    return (v.gamma_blk_a * amb.psi_a).trace().real() + (v.gamma_blk_b * amb.psi_b).trace().real() +
           (v.phi_blk_a * amb.xi_mat_a).trace().real() + (v.phi_blk_b * amb.xi_mat_b).trace().real() + v.alpha_a +
           v.alpha_b;
}

struct RobustAudit
{
    double budget_slack = 0.0; ///< epsilon mu - lhs (>= 0 when feasible)
    double lmi1_max_eig = 0.0;
    double lmi2_max_eig = 0.0;
    double q_min_eig = 0.0;
    double power_excess = 0.0; ///< max_i Tr(Q_i) - P_i
    double gamma_min_eig = 0.0;
    double phi_min_eig = 0.0;
    double phi_b_hermitian_dev = 0.0;
    double nu_e = 0.0;
    double mu = 0.0;
    double alpha_over_mu = 0.0;
    double pre_change_budget_excess = 0.0; ///< lhs / mu - epsilon with barred variables
    double pre_change_lmi2_max_eig = 0.0;  ///< max eig of the pre-change S-procedure LMI

    bool passes(double lmi_tol = 1e-7, double psd_tol = 1e-9) const
    {
        return budget_slack >= -lmi_tol && lmi1_max_eig <= lmi_tol && lmi2_max_eig <= lmi_tol &&
               q_min_eig >= -psd_tol && power_excess <= lmi_tol && gamma_min_eig >= -psd_tol &&
               phi_min_eig >= -psd_tol && phi_b_hermitian_dev <= 1e-9 && nu_e >= -psd_tol && mu >= 1e-10;
    }

    std::string summary() const
    {
        std::ostringstream os;
        os << "budget_slack=" << format_number(budget_slack) << " lmi1=" << format_number(lmi1_max_eig)
           << " lmi2=" << format_number(lmi2_max_eig) << " q_min=" << format_number(q_min_eig)
           << " power_excess=" << format_number(power_excess) << " gamma_min=" << format_number(gamma_min_eig)
           << " phi_min=" << format_number(phi_min_eig) << " mu=" << format_number(mu);
        return os.str();
    }
};

/// Recomputes every constraint from the variables alone.
inline RobustAudit audit(const RobustVariables &v, const SystemParams &p, const MomentModel &mm)
{
    const auto amb = build_ambiguity(mm);
    const int n = v.n();
    RobustAudit a;
    const double lhs = ambiguity_budget_lhs(v, amb);
    a.budget_slack = mm.epsilon * v.mu - lhs;
    a.lmi1_max_eig = max_eigenvalue(robust_lmi1(v));
    a.lmi2_max_eig = max_eigenvalue(robust_lmi2(v, p));
    a.q_min_eig = std::min(min_eigenvalue(v.q_a), min_eigenvalue(v.q_b));
    a.power_excess = std::max(trace_real(v.q_a) - p.p_a, trace_real(v.q_b) - p.p_b);
    a.gamma_min_eig = std::min(min_eigenvalue(v.gamma_blk_a), min_eigenvalue(v.gamma_blk_b));
    a.phi_min_eig = std::min(min_eigenvalue(v.phi_blk_a), min_eigenvalue(v.phi_blk_b));
    a.phi_b_hermitian_dev =
        std::max({max_hermitian_deviation(v.b_a()), max_hermitian_deviation(v.b_b()),
                  (v.phi_blk_a.bottomLeftCorner(n, n) - v.b_a()).cwiseAbs().maxCoeff(),
                  (v.phi_blk_b.bottomLeftCorner(n, n) - v.b_b()).cwiseAbs().maxCoeff()});
    a.nu_e = v.nu_e;
    a.mu = v.mu;
    if (v.mu > 0)
    {
        // Barred variables: Gamma_bar = Gamma / mu, alpha_bar = alpha / mu, mu_bar = 1 / mu.
        a.alpha_over_mu = (v.alpha_a + v.alpha_b) / v.mu;
        a.pre_change_budget_excess = lhs / v.mu - mm.epsilon;
        RobustVariables bar = v;
        bar.gamma_blk_a /= v.mu;
        bar.gamma_blk_b /= v.mu;
        bar.phi_blk_a /= v.mu;
        bar.phi_blk_b /= v.mu;
        bar.alpha_a /= v.mu;
        bar.alpha_b /= v.mu;
        cmat pre = detail::robust_lmi(bar, 1.0 - bar.alpha_a - bar.alpha_b, false);
        pre.topLeftCorner(n, n) += v.q_a / v.mu;
        pre.block(n, n, n, n) += v.q_b / v.mu;
        pre(2 * n, 2 * n) -= p.sigma_e2 * v.nu_e / v.mu;
        a.pre_change_lmi2_max_eig = max_eigenvalue(pre);
    }
    else
    {
        a.alpha_over_mu = std::numeric_limits<double>::infinity();
        a.pre_change_budget_excess = std::numeric_limits<double>::infinity();
        a.pre_change_lmi2_max_eig = std::numeric_limits<double>::infinity();
    }
    return a;
}

/// mu must be strictly positive. The alpha bound alpha_bar <= epsilon relies on
/// Psi_i and Xi_i being PSD, so it is only asserted in that case.
inline const RobustVariables &mu_positivity_guard(const RobustVariables &v, const MomentModel &mm)
{
    require(v.mu >= 1e-10, errc::internal_consistency, "mu = " + format_number(v.mu) + " is not strictly positive");
    const auto amb = build_ambiguity(mm);
    const double floor = -1e-12;
    const bool psd = min_eigenvalue(amb.psi_a) >= floor && min_eigenvalue(amb.psi_b) >= floor &&
                     min_eigenvalue(amb.xi_mat_a) >= floor && min_eigenvalue(amb.xi_mat_b) >= floor;
    if (psd)
        require((v.alpha_a + v.alpha_b) / v.mu <= mm.epsilon + 1e-8, errc::internal_consistency,
                "alpha_a + alpha_b exceeds epsilon after undoing the change of variables");
    return v;
}

// ---- conic encoding ----------------------------------------------------------

struct RobustProblem
{
    ConicProblem problem;
    HermitianVar q_a, q_b;
    int nu_e = 0, mu = 0, alpha = 0;
    std::array<ComplexVectorVar, 2> lambda;
    std::array<HermitianVar, 2> b;
    std::array<bool, 2> has_gamma{}, has_phi{};
    std::array<HermitianVar, 2> s, a, c;
    std::array<int, 2> theta{};
    rvec interior; ///< strictly feasible point

    /// Converts a solver point into RobustVariables, rebuilding eliminated blocks.
    RobustVariables variables(const rvec &x) const
    {
        RobustVariables v;
        const int n = q_a.dim;
        v.q_a = q_a.value(x);
        v.q_b = q_b.value(x);
        v.nu_e = x(nu_e);
        v.mu = x(mu);
        v.alpha_a = v.alpha_b = 0.5 * x(alpha);
        for (int i = 0; i < 2; ++i)
        {
            const cvec lam = lambda[i].value(x);
            cmat gam(n + 1, n + 1);
            if (has_gamma[i])
            {
                gam.topLeftCorner(n, n) = s[i].value(x);
                gam(n, n) = x(theta[i]);
            }
            else
            {
                // Any PSD completion; the block has no cost when tau_1 = 0.
                const double th = std::max(lam.norm(), 1.0);
                gam.topLeftCorner(n, n) = lam * lam.adjoint() / th;
                gam(n, n) = th;
            }
            gam.topRightCorner(n, 1) = lam;
            gam.bottomLeftCorner(1, n) = lam.adjoint();

            const cmat bm = b[i].value(x);
            cmat phi(2 * n, 2 * n);
            if (has_phi[i])
            {
                phi.topLeftCorner(n, n) = a[i].value(x);
                phi.bottomRightCorner(n, n) = c[i].value(x);
            }
            else
            {
                // [[|B|, B], [B, |B|]] is PSD for Hermitian B.
                Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(bm));
                const cmat absb =
                    es.eigenvectors() * es.eigenvalues().cwiseAbs().asDiagonal() * es.eigenvectors().adjoint();
                phi.topLeftCorner(n, n) = absb;
                phi.bottomRightCorner(n, n) = absb;
            }
            phi.topRightCorner(n, n) = bm;
            phi.bottomLeftCorner(n, n) = bm;
            (i == 0 ? v.gamma_blk_a : v.gamma_blk_b) = gam;
            (i == 0 ? v.phi_blk_a : v.phi_blk_b) = phi;
        }
        return v;
    }
};

/// Subproblem: maximize phi1 - linearized phi2 (nats) under every constraint of the safe approximation.
inline RobustProblem build_robust_problem(const RobustAnchor &anchor, const ChannelSet &ch, const SystemParams &p,
                                          const MomentModel &mm)
{
    p.validate();
    ch.validate(p.n_tx);
    mm.validate(p.n_tx);
    const int n = p.n_tx;
    const cmat eye = cmat::Identity(n, n);
    RobustProblem rp;
    auto &cp = rp.problem;

    rp.q_a = cp.add_hermitian("Q_a", n);
    rp.q_b = cp.add_hermitian("Q_b", n);
    rp.nu_e = cp.add_scalar("nu_e");
    rp.mu = cp.add_scalar("mu");
    rp.alpha = cp.add_scalar("alpha");
    const std::array<double, 2> tau1{mm.tau_1a, mm.tau_1b};
    const std::array<double, 2> tau2{mm.tau_2a, mm.tau_2b};
    const std::array<const cvec *, 2> xi{&mm.xi_a, &mm.xi_b};
    const std::array<const cmat *, 2> om{&mm.omega_a, &mm.omega_b};
    const std::array<std::string, 2> tag{"a", "b"};
    for (int i = 0; i < 2; ++i)
    {
        rp.lambda[i] = cp.add_complex_vector("lambda_" + tag[i], n);
        rp.b[i] = cp.add_hermitian("B_" + tag[i], n);
        rp.has_gamma[i] = tau1[i] > 0;
        rp.has_phi[i] = tau2[i] > 0;
        if (rp.has_gamma[i])
        {
            rp.s[i] = cp.add_hermitian("S_" + tag[i], n);
            rp.theta[i] = cp.add_scalar("theta_" + tag[i]);
        }
        if (rp.has_phi[i])
        {
            rp.a[i] = cp.add_hermitian("A_" + tag[i], n);
            rp.c[i] = cp.add_hermitian("C_" + tag[i], n);
        }
    }

    // Objective.
    cp.add_log_term(1.0, AffineScalar(p.sigma_a2) + p.zeta_a * quad_form_affine(rp.q_a, ch.h_aa) +
                             quad_form_affine(rp.q_b, ch.h_ba));
    cp.add_log_term(1.0, AffineScalar(p.sigma_b2) + p.zeta_b * quad_form_affine(rp.q_b, ch.h_bb) +
                             quad_form_affine(rp.q_a, ch.h_ab));
    const auto lin = linearize_phi2(anchor, ch, p);
    AffineScalar phi2_lin(lin.value - (anchor.q_a * lin.grad_a).trace().real() -
                          (anchor.q_b * lin.grad_b).trace().real() - lin.grad_nu * anchor.nu_e);
    phi2_lin += trace_affine(rp.q_a, lin.grad_a);
    phi2_lin += trace_affine(rp.q_b, lin.grad_b);
    phi2_lin.add(rp.nu_e, lin.grad_nu);
    cp.add_linear_objective(-1.0 * phi2_lin);

    // Power and sign constraints.
    AffineMatrix qa_psd(n), qb_psd(n);
    place_hermitian(qa_psd, rp.q_a, 0, 0);
    place_hermitian(qb_psd, rp.q_b, 0, 0);
    cp.add_lmi("Q_a_psd", qa_psd, LmiSense::psd);
    cp.add_lmi("Q_b_psd", qb_psd, LmiSense::psd);
    cp.add_inequality("power_a", AffineScalar(p.p_a) - trace_affine(rp.q_a, eye));
    cp.add_inequality("power_b", AffineScalar(p.p_b) - trace_affine(rp.q_b, eye));
    cp.add_inequality("nu_e_nonneg", AffineScalar().add(rp.nu_e, 1.0));
    cp.add_inequality("mu_nonneg", AffineScalar().add(rp.mu, 1.0));

    // Ambiguity budget: epsilon mu - alpha - sum_i [Tr(Gamma_i Psi_i) + Tr(Phi_i Xi_i)] >= 0.
    AffineScalar budget;
    budget.add(rp.mu, mm.epsilon).add(rp.alpha, -1.0);
    for (int i = 0; i < 2; ++i)
    {
        AffineScalar cost = -2.0 * inner_real_affine(rp.lambda[i], *xi[i]) - 2.0 * trace_affine(rp.b[i], *om[i]);
        if (rp.has_gamma[i])
        {
            cost += tau1[i] * trace_affine(rp.s[i], eye);
            cost.add(rp.theta[i], tau1[i]);
        }
        if (rp.has_phi[i])
            cost += tau2[i] * (trace_affine(rp.a[i], eye) + trace_affine(rp.c[i], eye));
        budget += -1.0 * cost;
    }
    cp.add_inequality("ambiguity_budget", budget);

    // Block LMIs.
    for (int which = 0; which < 2; ++which)
    {
        AffineMatrix m(2 * n + 1);
        place_hermitian(m, rp.b[0], 0, 0, 2.0);
        place_hermitian(m, rp.b[1], n, n, 2.0);
        if (which == 1)
        {
            place_hermitian(m, rp.q_a, 0, 0);
            place_hermitian(m, rp.q_b, n, n);
        }
        place_vector(m, rp.lambda[0], 0, 2 * n);
        place_vector(m, rp.lambda[1], n, 2 * n);
        AffineScalar corner;
        corner.add(rp.alpha, -1.0);
        if (which == 1)
            corner.add(rp.mu, 1.0).add(rp.nu_e, -p.sigma_e2);
        place_scalar(m, corner, 2 * n);
        cp.add_lmi(which == 0 ? "lmi_all_channels" : "lmi_outage_region", m, LmiSense::nsd);
    }
    for (int i = 0; i < 2; ++i)
    {
        if (rp.has_gamma[i])
        {
            AffineMatrix g(n + 1);
            place_hermitian(g, rp.s[i], 0, 0);
            place_vector(g, rp.lambda[i], 0, n);
            place_scalar(g, AffineScalar().add(rp.theta[i], 1.0), n);
            cp.add_lmi("Gamma_" + tag[i], g, LmiSense::psd);
        }
        if (rp.has_phi[i])
        {
            AffineMatrix f(2 * n);
            place_hermitian(f, rp.a[i], 0, 0);
            place_hermitian(f, rp.b[i], 0, n);
            place_hermitian(f, rp.c[i], n, n);
            cp.add_lmi("Phi_" + tag[i], f, LmiSense::psd);
        }
    }
    cp.set_ball(1e6);

    // Strictly feasible point: Q = P/(2N) I, lambda = 0, B = -b I, A = C = 2b I.
    rvec x = rvec::Zero(cp.variable_count());
    const std::array<double, 2> power{p.p_a, p.p_b};
    rp.q_a.assign(x, power[0] / (2.0 * n) * eye);
    rp.q_b.assign(x, power[1] / (2.0 * n) * eye);
    double cost = 0.0;
    for (int i = 0; i < 2; ++i)
    {
        const double bi = power[i] / (2.0 * n) + 0.1;
        rp.b[i].assign(x, -bi * eye);
        cost += 2.0 * bi * trace_real(*om[i]);
        if (rp.has_gamma[i])
        {
            rp.s[i].assign(x, eye);
            x(rp.theta[i]) = 1.0;
            cost += tau1[i] * (n + 1);
        }
        if (rp.has_phi[i])
        {
            rp.a[i].assign(x, 2.0 * bi * eye);
            rp.c[i].assign(x, 2.0 * bi * eye);
            cost += tau2[i] * 4.0 * bi * n;
        }
    }
    x(rp.alpha) = 1.0;
    x(rp.mu) = 2.0 * (cost + 1.0) / mm.epsilon;
    x(rp.nu_e) = (x(rp.mu) - 1.0) / p.sigma_e2 + 1.0;
    rp.interior = x;
    return rp;
}

struct RobustSubproblemResult
{
    RobustVariables variables;
    double surrogate = 0.0; ///< phi1 - linearized phi2 at the solution, nats
    ConicSolution conic;
};

inline RobustSubproblemResult solve_robust_subproblem(const RobustAnchor &anchor, const ChannelSet &ch,
                                                      const SystemParams &p, const MomentModel &mm,
                                                      const ConicOptions &opt = {})
{
    const auto rp = build_robust_problem(anchor, ch, p, mm);
    RobustSubproblemResult out;
    out.conic = solve(rp.problem, opt, &rp.interior);
    if (out.conic.status == ConicStatus::infeasible)
        throw error(errc::infeasible, "robust design infeasible at epsilon " + format_number(mm.epsilon) +
                                          ", tau (" + format_number(mm.tau_1a) + ", " + format_number(mm.tau_2a) +
                                          ")");
    out.variables = rp.variables(out.conic.x);
    out.surrogate = out.conic.objective;
    return out;
}

// ---- DC loop ---------------------------------------------------------------

struct RobustOptions
{
    double tol = 1e-5;
    int max_iter = 50;
    ConicOptions conic;
};

struct RobustResult
{
    RobustVariables variables;
    double r_s = 0.0;              ///< R_a + R_b - log2(1 + nu_e), bits/s/Hz
    std::vector<double> dc_trace;  ///< objective after each accepted DC step
    int iterations = 0;
    bool converged = false;
    RobustAudit audit;
    CovariancePair q() const { return {variables.q_a, variables.q_b}; }
};

/// Channels with Eve replaced by the mean estimates.
inline ChannelSet with_mean_eve(const ChannelSet &ch, const MomentModel &mm)
{
    ChannelSet c = ch;
    c.h_ae = mm.xi_a;
    c.h_be = mm.xi_b;
    return c;
}

struct NonrobustBaseline
{
    CovariancePair q;
    double r_s = 0.0; ///< unclamped R_a + R_b - R_e at the mean channels
};

/// Perfect-CSI design that treats the mean estimates as Eve's channels.
inline NonrobustBaseline nonrobust_baseline(const ChannelSet &ch, const SystemParams &p, const MomentModel &mm)
{
    const auto mean_ch = with_mean_eve(ch, mm);
    const auto fd = solve_fd_dc(mean_ch, p);
    const auto r = evaluate_rates(fd.q, mean_ch, p);
    return {fd.q, r.r_a + r.r_b - r.r_e};
}

inline RobustResult robust_dc_solve(const ChannelSet &ch, const SystemParams &p, const MomentModel &mm,
                                    const RobustOptions &opt = {})
{
    mm.validate(p.n_tx);
    const auto start = nonrobust_baseline(ch, p, mm);
    RobustAnchor anchor{start.q.q_a, start.q.q_b,
                        (quad_form(mm.xi_a, start.q.q_a) + quad_form(mm.xi_b, start.q.q_b)) / p.sigma_e2};

    RobustResult res;
    bool have = false;
    for (int it = 0; it < opt.max_iter; ++it)
    {
        const auto sub = solve_robust_subproblem(anchor, ch, p, mm, opt.conic);
        const auto &v = sub.variables;
        const double obj = robust_objective(v.q_a, v.q_b, v.nu_e, ch, p);
        ++res.iterations;
        if (have && obj < res.r_s)
        {
            // Solver noise below the previous value: keep the accepted point.
            res.converged = true;
            break;
        }
        const double gain = have ? obj - res.r_s : std::numeric_limits<double>::infinity();
        res.variables = v;
        res.r_s = obj;
        res.dc_trace.push_back(obj);
        have = true;
        anchor = {v.q_a, v.q_b, v.nu_e};
        if (gain < opt.tol)
        {
            res.converged = true;
            break;
        }
    }
    res.audit = audit(res.variables, p, mm);
    mu_positivity_guard(res.variables, mm);
    return res;
}

// ---- Eve channel samplers --------------------------------------------------

enum class EveFamily
{
    gaussian,
    binary,
    uniform,
    laplace
};

inline constexpr std::array<EveFamily, 4> all_eve_families{EveFamily::gaussian, EveFamily::binary, EveFamily::uniform,
                                                           EveFamily::laplace};

inline const char *to_string(EveFamily f)
{
    switch (f)
    {
    case EveFamily::gaussian:
        return "gaussian";
    case EveFamily::binary:
        return "binary";
    case EveFamily::uniform:
        return "uniform";
    case EveFamily::laplace:
        return "laplace";
    }
    return "unknown";
}

inline EveFamily parse_eve_family(const std::string &s)
{
    for (auto f : all_eve_families)
        if (s == to_string(f))
            return f;
    throw error(errc::invalid_argument, "unknown distribution family '" + s + "'");
}

/// Zero-mean, unit-variance, circular complex scalar of the given family.
inline cplx unit_scalar(EveFamily f, rng_engine &rng)
{
    switch (f)
    {
    case EveFamily::gaussian:
        return complex_normal(rng);
    case EveFamily::binary: {
        static const std::array<cplx, 4> support{cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)};
        std::uniform_int_distribution<int> pick(0, 3);
        return support[static_cast<std::size_t>(pick(rng))];
    }
    case EveFamily::uniform: {
        // Each part uniform on [-a, a] with a^2 / 3 = 1/2.
        const double a = std::sqrt(1.5);
        std::uniform_real_distribution<double> u(-a, a);
        const double re = u(rng);
        const double im = u(rng);
        return {re, im};
    }
    case EveFamily::laplace: {
        // Each part Laplace with scale 1/2 (variance 1/2), by inverse CDF.
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        auto draw = [&] {
            const double v = u(rng);
            return -0.5 * (v < 0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(v));
        };
        const double re = draw();
        const double im = draw();
        return {re, im};
    }
    }
    return 0.0;
}

struct EveSample
{
    cvec h_ae, h_be;
};

/// Factor L with L L^H = Omega - xi xi^H.
inline cmat moment_factor(const cvec &xi, const cmat &omega)
{
    const cmat cov = hermitian_part(omega - xi * xi.adjoint());
    Eigen::SelfAdjointEigenSolver<cmat> es(cov);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    require(es.eigenvalues().minCoeff() >= -1e-9 * scale, errc::invalid_argument,
            "second moment does not dominate the mean outer product");
    return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

/// i.i.d. draws xi + L z with z of the given family; exact mean xi and second moment Omega.
inline std::vector<EveSample> sample_ambiguous_eve(const MomentModel &mm, EveFamily family, std::uint64_t seed,
                                                   int count)
{
    require(count >= 0, errc::invalid_argument, "draw count must be nonnegative");
    const cmat la = moment_factor(mm.xi_a, mm.omega_a);
    const cmat lb = moment_factor(mm.xi_b, mm.omega_b);
    const auto n = mm.xi_a.size();
    rng_engine rng(seed);
    std::vector<EveSample> out(static_cast<std::size_t>(count));
    cvec z(n);
    for (auto &s : out)
    {
        for (Eigen::Index i = 0; i < n; ++i)
            z(i) = unit_scalar(family, rng);
        s.h_ae = mm.xi_a + la * z;
        for (Eigen::Index i = 0; i < n; ++i)
            z(i) = unit_scalar(family, rng);
        s.h_be = mm.xi_b + lb * z;
    }
    return out;
}

/// Moments moved to the edge of the ambiguity set: xi' = xi + tau1 u for a random
/// unit u, and Omega' = xi' xi'^H + (Omega - xi xi^H) + s v v^H for a random unit v,
/// with s >= 0 the largest value keeping |Omega' - Omega|_2 <= tau2.
inline MomentModel perturb_moments(const MomentModel &mm, std::uint64_t seed)
{
    rng_engine rng(seed);
    MomentModel out = mm;
    const std::array<double, 2> tau1{mm.tau_1a, mm.tau_1b};
    const std::array<double, 2> tau2{mm.tau_2a, mm.tau_2b};
    for (int i = 0; i < 2; ++i)
    {
        const cvec &xi = i == 0 ? mm.xi_a : mm.xi_b;
        const cmat &om = i == 0 ? mm.omega_a : mm.omega_b;
        const cmat cov = om - xi * xi.adjoint();
        cvec u = complex_normal_vector(rng, xi.size());
        u.normalize();
        cvec v = complex_normal_vector(rng, xi.size());
        v.normalize();
        cvec xi_new = xi + tau1[i] * u;
        auto deviation = [&](const cvec &x, double s) {
            const cmat omega_new = x * x.adjoint() + cov + s * v * v.adjoint();
            return hermitian_eigenvalues(omega_new - om).cwiseAbs().maxCoeff();
        };
        // Pull the mean back if its outer product alone breaks the second-moment radius.
        double shrink = 1.0;
        while (deviation(xi + shrink * tau1[i] * u, 0.0) > tau2[i] && shrink > 1e-6)
            shrink *= 0.5;
        xi_new = xi + shrink * tau1[i] * u;
        double lo = 0.0, hi = tau2[i] + 1.0;
        for (int k = 0; k < 200; ++k)
        {
            const double mid = 0.5 * (lo + hi);
            (deviation(xi_new, mid) <= tau2[i] ? lo : hi) = mid;
        }
        const cmat omega_new = hermitian_part(xi_new * xi_new.adjoint() + cov + lo * v * v.adjoint());
        (i == 0 ? out.xi_a : out.xi_b) = xi_new;
        (i == 0 ? out.omega_a : out.omega_b) = omega_new;
    }
    return out;
}

// ---- outage verification -------------------------------------------------------

struct OutageReport
{
    EveFamily family = EveFamily::gaussian;
    int draw_count = 0;
    double outage_rate = 0.0;
    double r_s = 0.0;
    std::vector<double> secrecy_rates; ///< clamped, per draw
};

/// Per-draw secrecy rates [R_a + R_b - R_e(draw)]^+ in bits/s/Hz.
inline std::vector<double> secrecy_rates(const CovariancePair &q, const ChannelSet &ch, const SystemParams &p,
                                         const std::vector<EveSample> &draws)
{
    const double legit = rate_a(q, ch, p) + rate_b(q, ch, p);
    std::vector<double> out;
    out.reserve(draws.size());
    for (const auto &d : draws)
    {
        const double leak = quad_form(d.h_ae, q.q_a) + quad_form(d.h_be, q.q_b);
        out.push_back(std::max(0.0, legit - std::log2(1.0 + leak / p.sigma_e2)));
    }
    return out;
}

/// Fraction of draws whose secrecy rate falls strictly below r_s. For r_s > 0 the
/// clamp does not change the event; for r_s <= 0 no draw is in outage.
inline OutageReport verify_outage(const CovariancePair &q, double r_s, const ChannelSet &ch, const SystemParams &p,
                                  const std::vector<EveSample> &draws, EveFamily family)
{
    OutageReport r;
    r.family = family;
    r.r_s = r_s;
    r.draw_count = static_cast<int>(draws.size());
    r.secrecy_rates = secrecy_rates(q, ch, p, draws);
    std::size_t below = 0;
    for (double s : r.secrecy_rates)
        below += s < r_s ? 1 : 0;
    r.outage_rate = draws.empty() ? 0.0 : static_cast<double>(below) / static_cast<double>(draws.size());
    return r;
}

/// All four families, each from its own derived stream.
inline std::vector<OutageReport> verify_outage_all(const CovariancePair &q, double r_s, const ChannelSet &ch,
                                                   const SystemParams &p, const MomentModel &sampling,
                                                   std::uint64_t seed, int count)
{
    std::vector<OutageReport> out;
    for (std::size_t k = 0; k < all_eve_families.size(); ++k)
    {
        const auto draws = sample_ambiguous_eve(sampling, all_eve_families[k], derive_seed(seed, 7, k), count);
        out.push_back(verify_outage(q, r_s, ch, p, draws, all_eve_families[k]));
    }
    return out;
}

inline double worst_outage(const std::vector<OutageReport> &reports)
{
    double w = 0.0;
    for (const auto &r : reports)
        w = std::max(w, r.outage_rate);
    return w;
}

inline void write_outage_csv(std::ostream &os, const std::vector<OutageReport> &reports)
{
    os << "family,draw_count,outage_rate,r_s\n";
    for (const auto &r : reports)
        os << to_string(r.family) << ',' << r.draw_count << ',' << format_number(r.outage_rate) << ','
           << format_number(r.r_s) << '\n';
}

struct HistogramBin
{
    double left = 0.0, right = 0.0;
    long count = 0;
};

/// Equal-width histogram of the secrecy rates over [min(rates, r_s), max(rates, r_s)].
inline std::vector<HistogramBin> histogram(const OutageReport &r, int bins = 50)
{
    require(bins >= 1, errc::invalid_argument, "histogram needs at least one bin");
    std::vector<HistogramBin> out;
    if (r.secrecy_rates.empty())
        return out;
    double lo = r.r_s, hi = r.r_s;
    for (double s : r.secrecy_rates)
    {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (hi <= lo)
        hi = lo + 1.0;
    const double width = (hi - lo) / bins;
    for (int k = 0; k < bins; ++k)
        out.push_back({lo + k * width, k + 1 == bins ? hi : lo + (k + 1) * width, 0});
    for (double s : r.secrecy_rates)
        ++out[static_cast<std::size_t>(std::min(bins - 1, static_cast<int>((s - lo) / width)))].count;
    return out;
}

inline void write_histogram_csv(std::ostream &os, const std::vector<OutageReport> &reports, int bins = 50)
{
    require(bins >= 1, errc::invalid_argument, "histogram needs at least one bin");
    os << "family,bin_left,bin_right,count\n";
    for (const auto &r : reports)
        for (const auto &b : histogram(r, bins))
            os << to_string(r.family) << ',' << format_number(b.left) << ',' << format_number(b.right) << ','
               << b.count << '\n';
}

} // namespace fdsec

#endif // FDSEC_ROBUST_HPP
