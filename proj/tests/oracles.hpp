// SPDX-License-Identifier: Apache-2.0
//
// Independent numerical oracles used by the tests. Nothing here calls into
// the solver code under test; projections are re-derived by bisection.

#ifndef FDSEC_TEST_ORACLES_HPP
#define FDSEC_TEST_ORACLES_HPP

#include <fdsec/core.hpp>
#include <fdsec/rng.hpp>

#include <vector>

namespace fdsec::testing
{

/// Projection of eigenvalues onto {x >= 0, sum x <= budget} by bisection on the shift.
inline rvec capped_projection_bisect(const rvec &v, double budget)
{
    const rvec pos = v.cwiseMax(0.0);
    if (pos.sum() <= budget)
        return pos;
    double lo = 0.0, hi = v.maxCoeff();
    for (int k = 0; k < 200; ++k)
    {
        const double mid = 0.5 * (lo + hi);
        if ((v.array() - mid).cwiseMax(0.0).sum() > budget)
            lo = mid;
        else
            hi = mid;
    }
    return (v.array() - hi).cwiseMax(0.0).matrix();
}

inline cmat psd_trace_projection(const cmat &w, double budget)
{
    Eigen::SelfAdjointEigenSolver<cmat> es((w + w.adjoint()) * 0.5);
    const rvec d = capped_projection_bisect(es.eigenvalues(), budget);
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

/// Accelerated projected-gradient ascent for max log(1 + h^H W h) - Tr(M W),
/// Tr W <= P, W >= 0, restarted from several random feasible points. Returns
/// the best objective found.
inline double subproblem_pga_oracle(const cvec &h, const cmat &m, double p, int restarts = 4,
                                    int iterations = 20000, std::uint64_t seed = 99)
{
    const auto n = h.size();
    auto value = [&](const cmat &w) { return std::log1p(h.dot(w * h).real()) - (m * w).trace().real(); };
    auto grad = [&](const cmat &w) {
        const double s = h.dot(w * h).real();
        return cmat(h * h.adjoint() / (1.0 + s) - m);
    };
    const double lipschitz = std::pow(h.squaredNorm(), 2) + 1e-12;
    const double step = 1.0 / lipschitz;
    rng_engine rng(seed);
    double best = -1e300;
    for (int r = 0; r < restarts; ++r)
    {
        cmat w;
        if (r == 0)
            w = cmat::Zero(n, n);
        else
        {
            const cmat g = complex_normal_matrix(rng, n, n);
            w = psd_trace_projection(g * g.adjoint(), p);
        }
        cmat y = w, w_prev = w;
        double t = 1.0;
        for (int k = 0; k < iterations; ++k)
        {
            w_prev = w;
            w = psd_trace_projection(y + step * grad(y), p);
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            y = w + ((t - 1.0) / t_next) * (w - w_prev);
            t = t_next;
            if (k % 50 == 49 && (w - w_prev).norm() < 1e-14)
                break;
        }
        best = std::max(best, value(w));
    }
    return best;
}

} // namespace fdsec::testing

#endif // FDSEC_TEST_ORACLES_HPP
