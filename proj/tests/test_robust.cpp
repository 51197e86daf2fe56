// SPDX-License-Identifier: Apache-2.0

#include "test_util.hpp"

#include <catch_amalgamated.hpp>
#include <fdsec/robust.hpp>

#include <sstream>

using namespace fdsec;
using fdsec::testing::random_psd;
using Catch::Approx;

namespace
{

SystemParams default_params(int n = 4)
{
    return SystemParams::symmetric(n, 5.0, 0.01);
}

MomentModel default_moments(int n = 4, double tau = 0.0, double epsilon = 0.05)
{
    return MomentModel::symmetric(n, 0.01, 0.002, tau, tau, epsilon);
}

MomentModel vacuous_moments(int n)
{
    MomentModel m;
    m.xi_a = m.xi_b = cvec::Zero(n);
    m.omega_a = m.omega_b = cmat::Zero(n, n);
    m.epsilon = 0.05;
    return m;
}

RobustAnchor random_anchor(rng_engine &rng, const SystemParams &p)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return {random_psd(rng, p.n_tx, p.p_a * u(rng)), random_psd(rng, p.n_tx, p.p_b * u(rng)), 3.0 * u(rng)};
}

/// The N = 2 instance mirrored in tests/oracles/robust_n2_oracle.py.
struct OracleInstance
{
    SystemParams p;
    ChannelSet ch;
    MomentModel mm;
    RobustAnchor anchor;
};

OracleInstance oracle_instance()
{
    OracleInstance o;
    o.p = SystemParams::symmetric(2, 5.0, 0.01);
    o.ch.h_ab = fdsec::testing::make_cvec({{0.8, 0.3}, {-0.4, 0.9}});
    o.ch.h_aa = fdsec::testing::make_cvec({{0.5, -0.2}, {0.7, 0.1}});
    o.ch.h_ba = fdsec::testing::make_cvec({{-0.6, 0.5}, {0.2, -0.8}});
    o.ch.h_bb = fdsec::testing::make_cvec({{0.3, 0.6}, {-0.9, 0.2}});
    o.ch.h_ae = o.ch.h_be = cvec::Zero(2);
    o.mm = MomentModel::symmetric(2, 0.01, 0.002, 0.05, 0.05, 0.05);
    const cmat q0 = o.p.p_a / 4.0 * cmat::Identity(2, 2);
    o.anchor = {q0, q0, 0.5};
    return o;
}

} // namespace

TEST_CASE("Ambiguity constants have the prescribed block layout")
{
    SECTION("zero radii and moments give zero blocks")
    {
        const auto amb = build_ambiguity(vacuous_moments(3));
        CHECK(amb.psi_a.norm() == 0.0);
        CHECK(amb.xi_mat_b.norm() == 0.0);
        CHECK(amb.psi_a.rows() == 4);
        CHECK(amb.xi_mat_a.rows() == 6);
    }
    SECTION("unit mean radius with zero mean gives the identity")
    {
        auto m = vacuous_moments(3);
        m.tau_1a = m.tau_1b = 1.0;
        const auto amb = build_ambiguity(m);
        CHECK((amb.psi_a - cmat::Identity(4, 4)).norm() == 0.0);
        CHECK((amb.psi_b - cmat::Identity(4, 4)).norm() == 0.0);
    }
    SECTION("default settings, entry by entry")
    {
        // xi = 0.01 (1 + j) 1_4, Omega = xi xi^H + 0.002 I = 0.0002 * 1 1^T + 0.002 I.
        const auto amb = build_ambiguity(default_moments(4, 0.05));
        for (int i = 0; i < 4; ++i)
        {
            CHECK(amb.psi_a(i, 4) == cplx(-0.01, -0.01));
            CHECK(amb.psi_a(4, i) == cplx(-0.01, 0.01));
            CHECK(amb.psi_a(i, i) == cplx(0.05));
            for (int j = 0; j < 4; ++j)
            {
                const double omega = 0.0002 + (i == j ? 0.002 : 0.0);
                CHECK(std::abs(amb.xi_mat_a(i, 4 + j) - cplx(-omega)) < 1e-15);
                CHECK(std::abs(amb.xi_mat_a(4 + i, j) - cplx(-omega)) < 1e-15);
                CHECK(std::abs(amb.xi_mat_a(i, j) - cplx(i == j ? 0.05 : 0.0)) < 1e-15);
                CHECK(std::abs(amb.xi_mat_a(4 + i, 4 + j) - cplx(i == j ? 0.05 : 0.0)) < 1e-15);
            }
        }
        CHECK(amb.psi_a(4, 4) == cplx(0.05));
    }
}

TEST_CASE("Moment model validation")
{
    auto m = default_moments();
    CHECK_NOTHROW(m.validate(4));
    CHECK_THROWS_AS(m.validate(3), error);
    m.omega_a = m.xi_a * m.xi_a.adjoint() - 0.01 * cmat::Identity(4, 4);
    CHECK_THROWS_AS(m.validate(4), error);
    m = default_moments();
    m.epsilon = 1.0;
    CHECK_THROWS_AS(m.validate(4), error);
    m = default_moments();
    m.tau_2b = -0.1;
    CHECK_THROWS_AS(m.validate(4), error);
}

TEST_CASE("DC split reproduces the rate objective")
{
    const auto p = default_params();
    const auto ch = sample_channels(17, p);
    const cmat z = cmat::Zero(4, 4);
    CHECK(phi1(z, z, ch, p) - phi2(z, z, 0.0, ch, p) == Approx(0.0).margin(1e-15));
    CHECK(robust_objective(z, z, 0.0, ch, p) == Approx(0.0).margin(1e-15));

    rng_engine rng(4);
    for (int k = 0; k < 100; ++k)
    {
        const auto a = random_anchor(rng, p);
        const double dc = phi1(a.q_a, a.q_b, ch, p) - phi2(a.q_a, a.q_b, a.nu_e, ch, p);
        CHECK(std::abs(dc - robust_objective(a.q_a, a.q_b, a.nu_e, ch, p)) < 1e-10);
    }
    CHECK(phi2(z, z, 1e300, ch, p) > 900.0);
    CHECK_THROWS_AS(phi2(z, z, -1.0, ch, p), error);
}

TEST_CASE("Linearized phi2 is a tangent over-estimator")
{
    const auto p = default_params();
    const auto ch = sample_channels(23, p);
    rng_engine rng(8);
    for (int k = 0; k < 30; ++k)
    {
        const auto at = random_anchor(rng, p);
        const auto lin = linearize_phi2(at, ch, p);
        CHECK(lin.eval(at.q_a, at.q_b, at.nu_e) == Approx(phi2_nats(at.q_a, at.q_b, at.nu_e, ch, p)).margin(1e-14));
        for (int j = 0; j < 10; ++j)
        {
            // phi2 is concave, so its tangent lies above it and phi1 - tangent lower-bounds the objective.
            const auto probe = random_anchor(rng, p);
            const double lin_v = lin.eval(probe.q_a, probe.q_b, probe.nu_e);
            CHECK(lin_v >= phi2_nats(probe.q_a, probe.q_b, probe.nu_e, ch, p) - 1e-9);
            CHECK(phi1_nats(probe.q_a, probe.q_b, ch, p) - lin_v <=
                  robust_objective(probe.q_a, probe.q_b, probe.nu_e, ch, p) * ln2 + 1e-9);
        }

        auto fa = [&](const cmat &q) { return phi2_nats(q, at.q_b, at.nu_e, ch, p); };
        auto fb = [&](const cmat &q) { return phi2_nats(at.q_a, q, at.nu_e, ch, p); };
        CHECK(fdsec::testing::gradient_fd_error(fa, at.q_a, lin.grad_a, 1e-5) < 1e-5);
        CHECK(fdsec::testing::gradient_fd_error(fb, at.q_b, lin.grad_b, 1e-5) < 1e-5);
        const double h = 1e-6;
        const double fd_nu = (phi2_nats(at.q_a, at.q_b, at.nu_e + h, ch, p) -
                              phi2_nats(at.q_a, at.q_b, at.nu_e - h, ch, p)) /
                             (2 * h);
        CHECK(std::abs(fd_nu - lin.grad_nu) / std::max(1.0, std::abs(lin.grad_nu)) < 1e-5);
    }
}

TEST_CASE("Robust conic encoding starts strictly feasible and dumps")
{
    const auto p = default_params();
    const auto ch = sample_channels(5, p);
    for (double tau : {0.0, 0.05})
    {
        const auto mm = default_moments(4, tau);
        const auto rp = build_robust_problem({cmat::Zero(4, 4), cmat::Zero(4, 4), 0.0}, ch, p, mm);
        ConicSolution at;
        at.x = rp.interior;
        at.objective = rp.problem.objective(rp.interior);
        const auto r = audit(rp.problem, at);
        CHECK(r.primal == 0.0);
        CHECK(r.min_lmi_eigenvalue > 0.0);
        CHECK(r.min_scalar_slack > 0.0);
        const auto v = rp.variables(rp.interior);
        CHECK(audit(v, p, mm).passes());

        std::ostringstream os;
        rp.problem.dump(os);
        CHECK(os.str().find("lmi lmi_outage_region nsd dim 9") != std::string::npos);
        CHECK((os.str().find("lmi Phi_a psd dim 8") != std::string::npos) == (tau > 0));
    }
}

TEST_CASE("Vacuous adversary needs no Eve-rate slack")
{
    const auto p = default_params(3);
    const auto ch = sample_channels(31, p);
    const auto mm = vacuous_moments(3);
    const RobustAnchor anchor{p.p_a / 3.0 * cmat::Identity(3, 3), p.p_b / 3.0 * cmat::Identity(3, 3), 0.0};
    const auto sub = solve_robust_subproblem(anchor, ch, p, mm);
    CHECK(sub.conic.status == ConicStatus::optimal);
    CHECK(sub.variables.nu_e < 1e-6);
    CHECK(audit(sub.variables, p, mm).passes());

    // The DC loop then reduces to maximizing R_a + R_b and must not lose ground
    // against its perfect-CSI cold start.
    const auto res = robust_dc_solve(ch, p, mm);
    const auto cold = nonrobust_baseline(ch, p, mm);
    const auto cold_rates = evaluate_rates(cold.q, ch, p);
    CHECK(res.r_s >= cold_rates.r_a + cold_rates.r_b - 1e-5);
    CHECK(res.variables.nu_e < 1e-6);
}

TEST_CASE("Robust subproblem matches an independent conic modeling oracle at N = 2")
{
    // Frozen output of tests/oracles/robust_n2_oracle.py (Clarabel and SCS agree to 2e-9).
    const double oracle = 0.381882913443;
    const auto o = oracle_instance();
    const auto sub = solve_robust_subproblem(o.anchor, o.ch, o.p, o.mm);
    REQUIRE(sub.conic.status == ConicStatus::optimal);
    CHECK(sub.surrogate == Approx(oracle).margin(1e-4));
    CHECK(std::abs(sub.surrogate - oracle) < 1e-6);

    const auto &v = sub.variables;
    const auto lin = linearize_phi2(o.anchor, o.ch, o.p);
    CHECK(sub.surrogate == Approx(phi1_nats(v.q_a, v.q_b, o.ch, o.p) - lin.eval(v.q_a, v.q_b, v.nu_e)).margin(1e-12));
}

TEST_CASE("Robust solutions pass the constraint audit")
{
    const auto p = default_params();
    for (double tau : {0.0, 0.05})
    {
        const auto mm = default_moments(4, tau);
        for (std::uint64_t k = 0; k < 2; ++k)
        {
            const auto ch = sample_channels(derive_seed(11, 0, k), p);
            const auto res = robust_dc_solve(ch, p, mm);
            const auto &a = res.audit;
            INFO(a.summary());
            CHECK(a.passes());
            CHECK(a.lmi1_max_eig <= 1e-7);
            CHECK(a.lmi2_max_eig <= 1e-7);
            CHECK(a.gamma_min_eig >= -1e-9);
            CHECK(a.phi_min_eig >= -1e-9);
            CHECK(a.budget_slack >= -1e-7);
            CHECK(a.mu >= 1e-10);
            // Undoing the change of variables keeps the original dual constraints.
            CHECK(a.pre_change_lmi2_max_eig <= 1e-7 / a.mu);
            CHECK(a.pre_change_budget_excess <= 1e-7 / a.mu);
            CHECK_NOTHROW(mu_positivity_guard(res.variables, mm));
            CHECK(res.q().is_feasible(p));

            // DC trace: nondecreasing and ending at the reported rate.
            REQUIRE(!res.dc_trace.empty());
            for (std::size_t i = 1; i < res.dc_trace.size(); ++i)
                CHECK(res.dc_trace[i] >= res.dc_trace[i - 1] - 1e-7);
            CHECK(res.dc_trace.back() == res.r_s);
            CHECK(res.converged);
            CHECK(std::isfinite(res.r_s));
            CHECK(res.r_s > 0.0);
            CHECK(res.r_s == Approx(robust_objective(res.variables.q_a, res.variables.q_b, res.variables.nu_e, ch, p))
                                 .margin(1e-12));
        }
    }
}

TEST_CASE("Rescaling the dual blocks acts homogeneously")
{
    const auto p = default_params();
    const auto ch = sample_channels(3, p);
    const auto mm = default_moments(4, 0.05);
    const auto res = robust_dc_solve(ch, p, mm);
    const auto &v = res.variables;
    const auto amb = build_ambiguity(mm);
    for (double t : {0.5, 2.0})
    {
        RobustVariables s = v;
        s.gamma_blk_a *= t;
        s.gamma_blk_b *= t;
        s.phi_blk_a *= t;
        s.phi_blk_b *= t;
        s.alpha_a *= t;
        s.alpha_b *= t;
        s.mu *= t;
        CHECK((robust_lmi1(s) - t * robust_lmi1(v)).norm() < 1e-12);
        CHECK(mm.epsilon * s.mu - ambiguity_budget_lhs(s, amb) ==
              Approx(t * (mm.epsilon * v.mu - ambiguity_budget_lhs(v, amb))).margin(1e-12));
        cmat inhom = cmat::Zero(9, 9);
        inhom.topLeftCorner(4, 4) = (1 - t) * v.q_a;
        inhom.block(4, 4, 4, 4) = (1 - t) * v.q_b;
        inhom(8, 8) = -(1 - t) * p.sigma_e2 * v.nu_e;
        CHECK((robust_lmi2(s, p) - t * robust_lmi2(v, p) - inhom).norm() < 1e-10);
        // PSD blocks and LMI 1 stay feasible under any positive scaling.
        const auto a = audit(s, p, mm);
        CHECK(a.lmi1_max_eig <= 1e-7 * t);
        CHECK(a.gamma_min_eig >= -1e-9 * t);
        CHECK(a.budget_slack >= -1e-7 * t);
    }
}

TEST_CASE("Loose outage threshold approaches the perfect-CSI design")
{
    const auto p = default_params();
    for (std::uint64_t k = 0; k < 3; ++k)
    {
        const auto ch = sample_channels(derive_seed(21, 0, k), p);
        const auto mm = default_moments(4, 0.0, 0.999);
        const auto res = robust_dc_solve(ch, p, mm);
        const auto base = nonrobust_baseline(ch, p, mm);
        CHECK(std::abs(res.r_s - base.r_s) < 0.1);
    }
}

TEST_CASE("Smaller ambiguity sets certify no less")
{
    const auto p = default_params();
    const auto ch = sample_channels(41, p);
    double previous = -std::numeric_limits<double>::infinity();
    for (double tau : {0.05, 0.025, 0.01, 0.0})
    {
        const auto res = robust_dc_solve(ch, p, default_moments(4, tau));
        CHECK(res.r_s >= previous - 1e-6);
        previous = res.r_s;
    }
}

TEST_CASE("Mu positivity guard")
{
    const auto p = default_params();
    const auto ch = sample_channels(2, p);
    const auto mm = default_moments();
    const auto res = robust_dc_solve(ch, p, mm);
    CHECK_NOTHROW(mu_positivity_guard(res.variables, mm));

    RobustVariables v = res.variables;
    v.mu = 0.0;
    CHECK_THROWS_AS(mu_positivity_guard(v, mm), error);

    // With PSD Psi and Xi (radii dominating the moments) alpha_bar <= epsilon must hold.
    auto psd_mm = vacuous_moments(4);
    psd_mm.tau_1a = psd_mm.tau_1b = psd_mm.tau_2a = psd_mm.tau_2b = 0.1;
    v = res.variables;
    v.mu = 1.0;
    v.alpha_a = v.alpha_b = 0.25;
    CHECK_THROWS_AS(mu_positivity_guard(v, psd_mm), error);
    v.alpha_a = v.alpha_b = 0.02;
    CHECK_NOTHROW(mu_positivity_guard(v, psd_mm));
}

TEST_CASE("Eve samplers match the prescribed moments")
{
    const int n = 3;
    rng_engine rng(99);
    MomentModel mm;
    mm.xi_a = complex_normal_vector(rng, n) * 0.3;
    mm.xi_b = complex_normal_vector(rng, n) * 0.1;
    mm.omega_a = mm.xi_a * mm.xi_a.adjoint() + random_psd(rng, n, 1.5);
    mm.omega_b = mm.xi_b * mm.xi_b.adjoint() + random_psd(rng, n, 0.5);
    const int count = 100000;
    for (auto f : all_eve_families)
    {
        INFO(to_string(f));
        const auto draws = sample_ambiguous_eve(mm, f, 1234, count);
        REQUIRE(draws.size() == static_cast<std::size_t>(count));
        for (int side = 0; side < 2; ++side)
        {
            const cvec &xi = side == 0 ? mm.xi_a : mm.xi_b;
            const cmat &om = side == 0 ? mm.omega_a : mm.omega_b;
            cvec mean = cvec::Zero(n);
            cmat second = cmat::Zero(n, n);
            for (const auto &d : draws)
            {
                const cvec &h = side == 0 ? d.h_ae : d.h_be;
                mean += h;
                second += h * h.adjoint();
            }
            mean /= count;
            second /= count;
            // Standard errors from the diagonal of the covariance and a fourth-moment bound.
            const cmat cov = om - xi * xi.adjoint();
            for (int i = 0; i < n; ++i)
            {
                const double se_mean = std::sqrt(cov(i, i).real() / count);
                CHECK(std::abs(mean(i) - xi(i)) <= 3.0 * std::sqrt(2.0) * se_mean + 1e-12);
                for (int j = 0; j < n; ++j)
                {
                    const double scale = std::sqrt(om(i, i).real() * om(j, j).real());
                    CHECK(std::abs(second(i, j) - om(i, j)) <= 3.0 * 3.0 * scale / std::sqrt(double(count)));
                }
            }
            if (f == EveFamily::gaussian)
                CHECK((mean - xi).cwiseAbs().maxCoeff() < 0.01);
        }
    }

    // Binary draws: whitened coordinates lie on {+-1, +-j}.
    const cmat la = moment_factor(mm.xi_a, mm.omega_a);
    const auto draws = sample_ambiguous_eve(mm, EveFamily::binary, 5, 200);
    for (const auto &d : draws)
    {
        const cvec z = la.fullPivLu().solve(d.h_ae - mm.xi_a);
        for (int i = 0; i < n; ++i)
        {
            const double dist = std::min({std::abs(z(i) - cplx(1, 0)), std::abs(z(i) - cplx(-1, 0)),
                                          std::abs(z(i) - cplx(0, 1)), std::abs(z(i) - cplx(0, -1))});
            CHECK(dist < 1e-8);
        }
    }

    // Determinism and error path.
    const auto a = sample_ambiguous_eve(mm, EveFamily::laplace, 7, 10);
    const auto b = sample_ambiguous_eve(mm, EveFamily::laplace, 7, 10);
    for (std::size_t k = 0; k < a.size(); ++k)
        CHECK((a[k].h_ae - b[k].h_ae).norm() == 0.0);
    MomentModel bad = mm;
    bad.omega_a = -cmat::Identity(n, n);
    CHECK_THROWS_AS(sample_ambiguous_eve(bad, EveFamily::gaussian, 1, 1), error);
    CHECK(parse_eve_family("uniform") == EveFamily::uniform);
    CHECK_THROWS_AS(parse_eve_family("cauchy"), error);
}

TEST_CASE("Perturbed moments sit on the edge of the ambiguity set")
{
    const auto mm = default_moments(4, 0.05);
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const auto pm = perturb_moments(mm, seed);
        for (int side = 0; side < 2; ++side)
        {
            const cvec &xi = side == 0 ? mm.xi_a : mm.xi_b;
            const cvec &xi2 = side == 0 ? pm.xi_a : pm.xi_b;
            const cmat &om = side == 0 ? mm.omega_a : mm.omega_b;
            const cmat &om2 = side == 0 ? pm.omega_a : pm.omega_b;
            CHECK((xi2 - xi).norm() <= 0.05 + 1e-12);
            const double dev = hermitian_eigenvalues(om2 - om).cwiseAbs().maxCoeff();
            CHECK(dev <= 0.05 + 1e-12);
            CHECK(dev >= 0.05 - 1e-9);
            CHECK(min_eigenvalue(om2 - xi2 * xi2.adjoint()) >= -1e-12);
        }
        CHECK_NOTHROW(pm.validate(4));
    }
    // Zero radii leave the moments unchanged.
    const auto same = perturb_moments(default_moments(4, 0.0), 3);
    CHECK((same.omega_a - default_moments().omega_a).norm() < 1e-12);
    CHECK((same.xi_b - default_moments().xi_b).norm() == 0.0);
}

TEST_CASE("Outage verification")
{
    const auto p = default_params();
    const auto ch = sample_channels(derive_seed(77, 0, 0), p);
    const auto mm = default_moments();

    SECTION("zero rate threshold never counts an outage")
    {
        const auto draws = sample_ambiguous_eve(mm, EveFamily::gaussian, 1, 1000);
        const auto rep = verify_outage(CovariancePair::zero(4), 0.0, ch, p, draws, EveFamily::gaussian);
        CHECK(rep.outage_rate == 0.0);
        const auto full = verify_outage({p.p_a / 4 * cmat::Identity(4, 4), p.p_b / 4 * cmat::Identity(4, 4)}, 0.0,
                                        ch, p, draws, EveFamily::gaussian);
        CHECK(full.outage_rate == 0.0);
    }
    SECTION("strict inequality at the threshold")
    {
        const CovariancePair q{p.p_a / 4 * cmat::Identity(4, 4), p.p_b / 4 * cmat::Identity(4, 4)};
        const auto draws = sample_ambiguous_eve(mm, EveFamily::uniform, 2, 1);
        const double rate = secrecy_rates(q, ch, p, draws)[0];
        CHECK(verify_outage(q, rate, ch, p, draws, EveFamily::uniform).outage_rate == 0.0);
        CHECK(verify_outage(q, std::nextafter(rate, 1e9), ch, p, draws, EveFamily::uniform).outage_rate == 1.0);
    }
    SECTION("robust design is safe, perfect-CSI design is not")
    {
        const int draws = 10000;
        const auto res = robust_dc_solve(ch, p, mm);
        const auto rob = verify_outage_all(res.q(), res.r_s, ch, p, mm, 5, draws);
        const double slack = 2.0 * std::sqrt(mm.epsilon * (1 - mm.epsilon) / draws);
        for (const auto &r : rob)
        {
            INFO(to_string(r.family));
            CHECK(r.outage_rate <= mm.epsilon + slack);
            CHECK(r.draw_count == draws);
        }
        const auto base = nonrobust_baseline(ch, p, mm);
        const auto non = verify_outage_all(base.q, base.r_s, ch, p, mm, 5, draws);
        CHECK(worst_outage(non) > mm.epsilon);

        std::ostringstream csv, hist;
        write_outage_csv(csv, rob);
        write_histogram_csv(hist, rob, 20);
        CHECK(csv.str().rfind("family,draw_count,outage_rate,r_s\n", 0) == 0);
        CHECK(hist.str().rfind("family,bin_left,bin_right,count\n", 0) == 0);
        long total = 0;
        std::istringstream lines(hist.str());
        std::string line;
        std::getline(lines, line);
        int rows = 0;
        while (std::getline(lines, line))
        {
            total += std::stol(line.substr(line.rfind(',') + 1));
            ++rows;
        }
        CHECK(rows == 4 * 20);
        CHECK(total == 4L * draws);
    }
}
