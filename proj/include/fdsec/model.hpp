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
// Full-duplex bidirectional wiretap model: Alice and Bob each have n_tx
// transmit antennas and one receive antenna, a single-antenna Eve listens
// to both. All rates are in bits/s/Hz.

#ifndef FDSEC_MODEL_HPP
#define FDSEC_MODEL_HPP

#include "core.hpp"
#include "rng.hpp"

#include <cstdint>
#include <string>

namespace fdsec
{

struct SystemParams
{
    int n_tx = 4;
    double sigma_a2 = 1.0;
    double sigma_b2 = 1.0;
    double sigma_e2 = 1.0;
    double zeta_a = 0.01;
    double zeta_b = 0.01;
    double p_a = 1.0;
    double p_b = 1.0;

    void validate() const
    {
        require(n_tx >= 1, errc::invalid_argument, "n_tx must be >= 1");
        require(sigma_a2 > 0 && sigma_b2 > 0 && sigma_e2 > 0, errc::invalid_argument,
                "noise powers must be positive");
        require(zeta_a > 0 && zeta_a < 1 && zeta_b > 0 && zeta_b < 1, errc::invalid_argument,
                "SI residual factors must lie in (0,1)");
        require(p_a > 0 && p_b > 0, errc::invalid_argument, "power budgets must be positive");
    }

    /// Unit noise, equal SI factor and equal budget P (dB, unit noise floor).
    static SystemParams symmetric(int n_tx, double power_db, double zeta)
    {
        SystemParams p;
        p.n_tx = n_tx;
        p.zeta_a = p.zeta_b = zeta;
        p.p_a = p.p_b = db_to_linear(power_db);
        return p;
    }

    /// Alice <-> Bob role swap.
    SystemParams mirrored() const
    {
        SystemParams m = *this;
        std::swap(m.sigma_a2, m.sigma_b2);
        std::swap(m.zeta_a, m.zeta_b);
        std::swap(m.p_a, m.p_b);
        return m;
    }
};

struct ChannelSet
{
    cvec h_ab, h_ae, h_aa;
    cvec h_ba, h_be, h_bb;

    void validate(int n_tx) const
    {
        for (const cvec *h : {&h_ab, &h_ae, &h_aa, &h_ba, &h_be, &h_bb})
            require(h->size() == n_tx, errc::dimension_mismatch,
                    "channel length " + std::to_string(h->size()) + " != n_tx " + std::to_string(n_tx));
    }

    ChannelSet mirrored() const { return {h_ba, h_be, h_bb, h_ab, h_ae, h_aa}; }
};

struct CovariancePair
{
    cmat q_a;
    cmat q_b;

    static CovariancePair zero(int n) { return {cmat::Zero(n, n), cmat::Zero(n, n)}; }

    /// Hermitian to 1e-10, PSD to -1e-9 * lambda_max, trace within budget (1 + 1e-8).
    bool is_feasible(const SystemParams &p, std::string *why = nullptr) const
    {
        auto fail = [&](const std::string &msg) {
            if (why)
                *why = msg;
            return false;
        };
        for (int k = 0; k < 2; ++k)
        {
            const cmat &q = k == 0 ? q_a : q_b;
            const double budget = k == 0 ? p.p_a : p.p_b;
            const char *name = k == 0 ? "q_a" : "q_b";
            if (q.rows() != p.n_tx || q.cols() != p.n_tx)
                return fail(std::string(name) + " has wrong dimension");
            if (max_hermitian_deviation(q) > 1e-10)
                return fail(std::string(name) + " is not Hermitian");
            const rvec ev = hermitian_eigenvalues(q);
            if (ev.minCoeff() < -1e-9 * std::max(ev.maxCoeff(), 0.0))
                return fail(std::string(name) + " is not PSD");
            if (trace_real(q) > budget * (1 + 1e-8))
                return fail(std::string(name) + " exceeds its power budget");
        }
        return true;
    }
};

struct RateSet
{
    double r_a = 0; ///< Bob -> Alice
    double r_b = 0; ///< Alice -> Bob
    double r_e = 0; ///< Eve's sum rate
    double ssr = 0; ///< [r_a + r_b - r_e]^+
};

namespace detail
{
inline void check_dims(const CovariancePair &pair, const ChannelSet &ch)
{
    const auto n = ch.h_ab.size();
    ch.validate(static_cast<int>(n));
    require(pair.q_a.rows() == n && pair.q_a.cols() == n && pair.q_b.rows() == n && pair.q_b.cols() == n,
            errc::dimension_mismatch, "covariance dimension does not match channel length");
}
} // namespace detail

inline double sinr_a(const CovariancePair &pair, const ChannelSet &ch, const SystemParams &p)
{
    detail::check_dims(pair, ch);
    const double signal = quad_form(ch.h_ba, hermitian_part(pair.q_b));
    const double si = quad_form(ch.h_aa, hermitian_part(pair.q_a));
    return std::max(signal, 0.0) / (p.sigma_a2 + p.zeta_a * std::max(si, 0.0));
}

inline double sinr_b(const CovariancePair &pair, const ChannelSet &ch, const SystemParams &p)
{
    detail::check_dims(pair, ch);
    const double signal = quad_form(ch.h_ab, hermitian_part(pair.q_a));
    const double si = quad_form(ch.h_bb, hermitian_part(pair.q_b));
    return std::max(signal, 0.0) / (p.sigma_b2 + p.zeta_b * std::max(si, 0.0));
}

inline double rate_a(const CovariancePair &pair, const ChannelSet &ch, const SystemParams &p)
{
    return std::log2(1.0 + sinr_a(pair, ch, p));
}

inline double rate_b(const CovariancePair &pair, const ChannelSet &ch, const SystemParams &p)
{
    return std::log2(1.0 + sinr_b(pair, ch, p));
}

inline double rate_eve(const CovariancePair &pair, const ChannelSet &ch, const SystemParams &p)
{
    detail::check_dims(pair, ch);
    const double leak = quad_form(ch.h_ae, hermitian_part(pair.q_a)) + quad_form(ch.h_be, hermitian_part(pair.q_b));
    return std::log2(1.0 + std::max(leak, 0.0) / p.sigma_e2);
}

inline RateSet evaluate_rates(const CovariancePair &pair, const ChannelSet &ch, const SystemParams &p)
{
    RateSet r;
    r.r_a = rate_a(pair, ch, p);
    r.r_b = rate_b(pair, ch, p);
    r.r_e = rate_eve(pair, ch, p);
    r.ssr = std::max(0.0, r.r_a + r.r_b - r.r_e);
    return r;
}

inline double sum_secrecy_rate(const CovariancePair &pair, const ChannelSet &ch, const SystemParams &p)
{
    return evaluate_rates(pair, ch, p).ssr;
}

/// i.i.d. CN(0,1) entries; order h_ab, h_ae, h_aa, h_ba, h_be, h_bb.
inline ChannelSet sample_channels(std::uint64_t seed, const SystemParams &p)
{
    rng_engine rng(seed);
    ChannelSet ch;
    ch.h_ab = complex_normal_vector(rng, p.n_tx);
    ch.h_ae = complex_normal_vector(rng, p.n_tx);
    ch.h_aa = complex_normal_vector(rng, p.n_tx);
    ch.h_ba = complex_normal_vector(rng, p.n_tx);
    ch.h_be = complex_normal_vector(rng, p.n_tx);
    ch.h_bb = complex_normal_vector(rng, p.n_tx);
    return ch;
}

} // namespace fdsec

#endif // FDSEC_MODEL_HPP
