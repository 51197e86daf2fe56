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

#ifndef FDSEC_CORE_HPP
#define FDSEC_CORE_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdsec
{

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;

inline constexpr double ln2 = std::numbers::ln2;

/// Error categories surfaced by the library. The CLI maps them to exit codes.
enum class errc
{
    invalid_argument,
    dimension_mismatch,
    degenerate_channel,
    bracketing_failure,
    infeasible,
    internal_consistency,
    config
};

inline const char *to_string(errc code)
{
    switch (code)
    {
    case errc::invalid_argument:
        return "invalid_argument";
    case errc::dimension_mismatch:
        return "dimension_mismatch";
    case errc::degenerate_channel:
        return "degenerate_channel";
    case errc::bracketing_failure:
        return "bracketing_failure";
    case errc::infeasible:
        return "infeasible";
    case errc::internal_consistency:
        return "internal_consistency";
    case errc::config:
        return "config";
    }
    return "unknown";
}

class error : public std::runtime_error
{
  public:
    error(errc code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    errc code() const noexcept { return code_; }

  private:
    errc code_;
};

inline void require(bool condition, errc code, const std::string &what)
{
    if (!condition)
        throw error(code, what);
}

// ---- small linear-algebra helpers --------------------------------------

/// Real part of h^H Q h; the imaginary residue of a Hermitian form is discarded.
inline double quad_form(const cvec &h, const cmat &q)
{
    return h.dot(q * h).real();
}

inline cmat hermitian_part(const cmat &q)
{
    return (q + q.adjoint()) * 0.5;
}

inline double max_hermitian_deviation(const cmat &q)
{
    if (q.size() == 0)
        return 0.0;
    return (q - q.adjoint()).cwiseAbs().maxCoeff();
}

inline rvec hermitian_eigenvalues(const cmat &q)
{
    if (q.rows() == 0)
        return rvec();
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(q), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

inline double min_eigenvalue(const cmat &q)
{
    if (q.rows() == 0)
        return 0.0;
    return hermitian_eigenvalues(q).minCoeff();
}

inline double max_eigenvalue(const cmat &q)
{
    if (q.rows() == 0)
        return 0.0;
    return hermitian_eigenvalues(q).maxCoeff();
}

inline double trace_real(const cmat &q)
{
    return q.trace().real();
}

/// Fixed "%.12g" rendering so emitted tables are byte-reproducible.
inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

/// Euclidean projection of a real vector onto {x >= 0, sum(x) <= budget}.
inline rvec project_capped_nonnegative(const rvec &v, double budget)
{
    rvec x = v.cwiseMax(0.0);
    if (x.sum() <= budget)
        return x;
    // Active budget: threshold search on the sorted values.
    std::vector<double> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end(), std::greater<>());
    double cumulative = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k)
    {
        cumulative += s[k];
        const double candidate = (cumulative - budget) / static_cast<double>(k + 1);
        if (k + 1 == s.size() || s[k + 1] <= candidate)
        {
            theta = candidate;
            break;
        }
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

/// Projection onto {W Hermitian PSD, Tr(W) <= budget} in Frobenius norm.
inline cmat project_psd_trace(const cmat &w, double budget)
{
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(w));
    const rvec d = project_capped_nonnegative(es.eigenvalues(), budget);
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace fdsec

#endif // FDSEC_CORE_HPP
