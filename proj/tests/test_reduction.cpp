// SPDX-License-Identifier: Apache-2.0

#include "test_util.hpp"

#include <catch_amalgamated.hpp>
#include <fdsec/reduction.hpp>

using namespace fdsec;
using fdsec::testing::random_psd;
using Catch::Approx;

namespace
{

double orthonormality_error(const cmat &u)
{
    return (u.adjoint() * u - cmat::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("Orthonormal basis of coordinate vectors", "[reduction]")
{
    const cvec e1 = cvec::Unit(4, 0), e2 = cvec::Unit(4, 1);
    const cmat u = orthonormal_basis({e1, e2});
    REQUIRE(u.cols() == 2);
    CHECK(orthonormality_error(u) < 1e-12);
    const cmat proj = u * u.adjoint();
    CHECK((proj * e1 - e1).norm() < 1e-12);
    CHECK((proj * e2 - e2).norm() < 1e-12);
    CHECK(std::abs(proj(2, 2)) < 1e-12);
}

TEST_CASE("Rank-deficient column sets drop dependent columns", "[reduction]")
{
    rng_engine rng(1);
    const cvec v = complex_normal_vector(rng, 5);
    CHECK(orthonormal_basis({v, 2.0 * v}).cols() == 1);
    CHECK(orthonormal_basis({v, cplx(0, 3) * v, v}).cols() == 1);
    REQUIRE_THROWS_AS(orthonormal_basis({cvec::Zero(3), cvec::Zero(3)}), error);
}

TEST_CASE("Projector agrees with a Householder QR factorization", "[reduction]")
{
    rng_engine rng(2);
    for (int trial = 0; trial < 20; ++trial)
    {
        std::vector<cvec> cols{complex_normal_vector(rng, 8), complex_normal_vector(rng, 8),
                               complex_normal_vector(rng, 8)};
        const cmat u = orthonormal_basis(std::span<const cvec>(cols));
        REQUIRE(u.cols() == 3);
        cmat a(8, 3);
        for (int k = 0; k < 3; ++k)
            a.col(k) = cols[k];
        const Eigen::HouseholderQR<cmat> qr(a);
        const cmat q = qr.householderQ() * cmat::Identity(8, 3);
        CHECK((u * u.adjoint() - q * q.adjoint()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(orthonormality_error(u) < 1e-10);
    }
}

TEST_CASE("Reduced channels preserve norms of spanning channels", "[reduction]")
{
    SystemParams p;
    p.n_tx = 6;
    const auto ch = sample_channels(77, p);
    const auto rp = reduce(ch, p);
    CHECK(rp.r_a() == 3);
    CHECK(rp.r_b() == 3);
    CHECK(orthonormality_error(rp.u_a) < 1e-10);
    CHECK(rp.ht_ab.norm() == Approx(ch.h_ab.norm()).epsilon(1e-10));
    CHECK(rp.ht_aa.norm() == Approx(ch.h_aa.norm()).epsilon(1e-10));
    CHECK(rp.ht_be.norm() == Approx(ch.h_be.norm()).epsilon(1e-10));
}

TEST_CASE("Identical channel triple reduces to rank one", "[reduction]")
{
    SystemParams p;
    p.n_tx = 4;
    auto ch = sample_channels(3, p);
    ch.h_aa = ch.h_ab;
    ch.h_ae = ch.h_ab;
    const auto rp = reduce(ch, p);
    CHECK(rp.r_a() == 1);
    CHECK(rp.r_b() == 3);
}

TEST_CASE("N = 3 full-rank reduction is a unitary change of basis", "[reduction]")
{
    SystemParams p;
    p.n_tx = 3;
    const auto rp = reduce(sample_channels(8, p), p);
    REQUIRE(rp.u_a.cols() == 3);
    CHECK((rp.u_a * rp.u_a.adjoint() - cmat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Lift of trivial reduced covariances", "[reduction]")
{
    SystemParams p;
    p.n_tx = 5;
    const auto rp = reduce(sample_channels(4, p), p);
    const auto zero = lift({cmat::Zero(3, 3), cmat::Zero(3, 3)}, rp);
    CHECK(zero.q_a.norm() == 0.0);
    const auto ident = lift({cmat::Identity(3, 3), cmat::Identity(3, 3)}, rp);
    CHECK((ident.q_a - rp.u_a * rp.u_a.adjoint()).norm() < 1e-14);
    CHECK(trace_real(ident.q_b) == Approx(3.0).epsilon(1e-12));
    REQUIRE_THROWS_AS(lift({cmat::Zero(2, 2), cmat::Zero(3, 3)}, rp), error);
}

TEST_CASE("Reduced objective equals the full objective after lifting", "[reduction][property]")
{
    rng_engine rng(21);
    for (int trial = 0; trial < 100; ++trial)
    {
        auto p = SystemParams::symmetric(2 + trial % 7, 5.0, 0.01);
        const auto ch = sample_channels(derive_seed(21, 0, trial), p);
        const auto rp = reduce(ch, p);
        const ReducedCovariancePair w{random_psd(rng, rp.r_a(), p.p_a), random_psd(rng, rp.r_b(), p.p_b)};
        const auto q = lift(w, rp);
        const auto full = evaluate_rates(q, ch, p);
        const auto red = reduced_rates(w, rp);
        CHECK(std::abs((full.r_a + full.r_b - full.r_e) - red.ssr) < 1e-8);
        CHECK(std::abs(trace_real(q.q_a) - trace_real(w.w_a)) < 1e-12);
    }
}

TEST_CASE("Reduce after lift keeps quadratic forms", "[reduction][property]")
{
    rng_engine rng(22);
    SystemParams p;
    p.n_tx = 6;
    const auto ch = sample_channels(9, p);
    const auto rp = reduce(ch, p);
    const ReducedCovariancePair w{random_psd(rng, 3, 1.0), random_psd(rng, 3, 1.0)};
    const auto q = lift(w, rp);
    const auto rp2 = reduce(ch, p);
    const ReducedCovariancePair w2{rp2.u_a.adjoint() * q.q_a * rp2.u_a, rp2.u_b.adjoint() * q.q_b * rp2.u_b};
    CHECK(quad_form(rp2.ht_ab, w2.w_a) == Approx(quad_form(rp.ht_ab, w.w_a)).epsilon(1e-12));
    CHECK(quad_form(rp2.ht_be, w2.w_b) == Approx(quad_form(rp.ht_be, w.w_b)).epsilon(1e-12));
}

TEST_CASE("Mirrored problem swaps the roles of the two nodes", "[reduction]")
{
    SystemParams p = SystemParams::symmetric(4, 3.0, 0.05);
    p.sigma_a2 = 0.5;
    p.p_b = 7.0;
    const auto ch = sample_channels(12, p);
    const auto rp = reduce(ch, p);
    rng_engine rng(4);
    const ReducedCovariancePair w{random_psd(rng, 3, 1.0), random_psd(rng, 3, 2.0)};
    const auto a = reduced_rates(w, rp);
    const auto b = reduced_rates(w.mirrored(), rp.mirrored());
    CHECK(a.r_a == Approx(b.r_b).epsilon(1e-14));
    CHECK(a.r_b == Approx(b.r_a).epsilon(1e-14));
    CHECK(a.r_e == Approx(b.r_e).epsilon(1e-14));
    CHECK(rp.mirrored().params.p_a == 7.0);
}
