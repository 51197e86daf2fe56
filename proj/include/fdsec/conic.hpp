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
// Small log-det barrier solver for problems of the form
//
//     maximize   sum_k w_k log a_k(x) + c(x)
//     subject to F_j(x) >= 0 (Hermitian LMIs), g_k(x) >= 0, |x| <= R,
//
// with a_k, c, g_k affine in a real vector x and F_j affine Hermitian. Complex
// Hermitian and complex vector variables are lowered onto x here; LMIs stay
// complex (no real embedding). Log terms are handled natively by the barrier
// so every iterate is strictly feasible and its objective is a valid lower
// bound on the optimum.

#ifndef FDSEC_CONIC_HPP
#define FDSEC_CONIC_HPP

#include "core.hpp"

#include <limits>
#include <map>
#include <tuple>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace fdsec
{

struct LinearTerm
{
    int var;
    double coeff;
};

/// constant + sum coeff * x[var]
struct AffineScalar
{
    double constant = 0.0;
    std::vector<LinearTerm> terms;

    AffineScalar() = default;
    explicit AffineScalar(double c) : constant(c) {}

    AffineScalar &add(int var, double coeff)
    {
        if (coeff != 0.0)
            terms.push_back({var, coeff});
        return *this;
    }

    AffineScalar &operator+=(const AffineScalar &o)
    {
        constant += o.constant;
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        return *this;
    }

    AffineScalar &operator*=(double s)
    {
        constant *= s;
        for (auto &t : terms)
            t.coeff *= s;
        return *this;
    }

    double eval(const rvec &x) const
    {
        double v = constant;
        for (const auto &t : terms)
            v += t.coeff * x(t.var);
        return v;
    }
};

inline AffineScalar operator+(AffineScalar a, const AffineScalar &b) { return a += b; }
inline AffineScalar operator*(double s, AffineScalar a) { return a *= s; }
inline AffineScalar operator-(AffineScalar a, const AffineScalar &b) { return a += (-1.0) * b; }

/// coeff * x[var] at (row, col); the Hermitian mirror is implied for row != col.
struct MatrixEntry
{
    int var;
    int row;
    int col;
    cplx coeff;
};

/// Affine Hermitian matrix expression. Only one triangle is stored per entry.
struct AffineMatrix
{
    int dim = 0;
    cmat constant;
    std::vector<MatrixEntry> entries;

    AffineMatrix() = default;
    explicit AffineMatrix(int n) : dim(n), constant(cmat::Zero(n, n)) {}

    void add(int var, int row, int col, cplx coeff)
    {
        require(row >= 0 && col >= 0 && row < dim && col < dim, errc::dimension_mismatch, "LMI entry out of range");
        if (coeff == cplx(0.0))
            return;
        if (row > col)
        {
            std::swap(row, col);
            coeff = std::conj(coeff);
        }
        if (row == col)
            coeff = coeff.real();
        entries.push_back({var, row, col, coeff});
    }

    cmat eval(const rvec &x) const
    {
        cmat m = constant;
        for (const auto &e : entries)
        {
            const cplx v = e.coeff * x(e.var);
            m(e.row, e.col) += v;
            if (e.row != e.col)
                m(e.col, e.row) += std::conj(v);
        }
        return hermitian_part(m);
    }
};

/// Hermitian d x d variable: d diagonal reals, then (re, im) for each i < j.
struct HermitianVar
{
    int offset = 0;
    int dim = 0;

    int count() const { return dim * dim; }
    int diag(int i) const { return offset + i; }
    int re(int i, int j) const { return offset + dim + 2 * pair_index(i, j); }
    int im(int i, int j) const { return re(i, j) + 1; }

    /// Linear representation of entry (i, j) as (var, coeff) pairs.
    std::vector<std::pair<int, cplx>> entry(int i, int j) const
    {
        if (i == j)
            return {{diag(i), 1.0}};
        if (i < j)
            return {{re(i, j), 1.0}, {im(i, j), cplx(0, 1)}};
        return {{re(j, i), 1.0}, {im(j, i), cplx(0, -1)}};
    }

    cmat value(const rvec &x) const
    {
        cmat m(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
            {
                cplx v = 0;
                for (const auto &[var, c] : entry(i, j))
                    v += c * x(var);
                m(i, j) = v;
            }
        return m;
    }

    /// Writes a Hermitian matrix into x.
    void assign(rvec &x, const cmat &m) const
    {
        for (int i = 0; i < dim; ++i)
        {
            x(diag(i)) = m(i, i).real();
            for (int j = i + 1; j < dim; ++j)
            {
                const cplx v = 0.5 * (m(i, j) + std::conj(m(j, i)));
                x(re(i, j)) = v.real();
                x(im(i, j)) = v.imag();
            }
        }
    }

  private:
    int pair_index(int i, int j) const
    {
        // Row-major index of (i, j), i < j, in the strict upper triangle.
        return i * dim - i * (i + 1) / 2 + (j - i - 1);
    }
};

/// Complex d-vector variable: (re, im) per entry.
struct ComplexVectorVar
{
    int offset = 0;
    int dim = 0;

    int count() const { return 2 * dim; }
    int re(int i) const { return offset + 2 * i; }
    int im(int i) const { return offset + 2 * i + 1; }

    cvec value(const rvec &x) const
    {
        cvec v(dim);
        for (int i = 0; i < dim; ++i)
            v(i) = {x(re(i)), x(im(i))};
        return v;
    }

    void assign(rvec &x, const cvec &v) const
    {
        for (int i = 0; i < dim; ++i)
        {
            x(re(i)) = v(i).real();
            x(im(i)) = v(i).imag();
        }
    }
};

// ---- expression helpers ---------------------------------------------------

/// Re Tr(W X) for a Hermitian variable X.
inline AffineScalar trace_affine(const HermitianVar &x, const cmat &w)
{
    AffineScalar a;
    for (int i = 0; i < x.dim; ++i)
    {
        a.add(x.diag(i), w(i, i).real());
        for (int j = i + 1; j < x.dim; ++j)
        {
            a.add(x.re(i, j), (w(j, i) + w(i, j)).real());
            a.add(x.im(i, j), (cplx(0, 1) * (w(j, i) - w(i, j))).real());
        }
    }
    return a;
}

/// h^H X h.
inline AffineScalar quad_form_affine(const HermitianVar &x, const cvec &h)
{
    return trace_affine(x, h * h.adjoint());
}

/// Re(v^H y) for a complex vector variable v.
inline AffineScalar inner_real_affine(const ComplexVectorVar &v, const cvec &y)
{
    AffineScalar a;
    for (int i = 0; i < v.dim; ++i)
    {
        a.add(v.re(i), y(i).real());
        a.add(v.im(i), y(i).imag());
    }
    return a;
}

/// scale * X placed with its top-left corner at (row0, col0). A diagonal
/// block (row0 == col0) contributes its upper triangle; an off-diagonal block
/// must lie strictly above the diagonal and contributes every entry.
inline void place_hermitian(AffineMatrix &m, const HermitianVar &x, int row0, int col0, double scale = 1.0)
{
    const bool diagonal_block = row0 == col0;
    require(diagonal_block || row0 + x.dim <= col0, errc::invalid_argument,
            "off-diagonal Hermitian blocks must sit strictly above the diagonal");
    for (int i = 0; i < x.dim; ++i)
        for (int j = diagonal_block ? i : 0; j < x.dim; ++j)
            for (const auto &[var, c] : x.entry(i, j))
                m.add(var, row0 + i, col0 + j, scale * c);
}

/// scale * v as a column segment starting at (row0, col), above the diagonal.
inline void place_vector(AffineMatrix &m, const ComplexVectorVar &v, int row0, int col, double scale = 1.0)
{
    require(row0 + v.dim <= col, errc::invalid_argument, "vector blocks must sit strictly above the diagonal");
    for (int i = 0; i < v.dim; ++i)
    {
        m.add(v.re(i), row0 + i, col, scale);
        m.add(v.im(i), row0 + i, col, cplx(0, scale));
    }
}

inline void place_scalar(AffineMatrix &m, const AffineScalar &s, int row)
{
    m.constant(row, row) += s.constant;
    for (const auto &t : s.terms)
        m.add(t.var, row, row, t.coeff);
}

// ---- problem --------------------------------------------------------------

enum class LmiSense
{
    psd, ///< F(x) >= 0
    nsd  ///< F(x) <= 0
};

struct LmiConstraint
{
    std::string name;
    AffineMatrix matrix;
    LmiSense sense = LmiSense::psd;

    /// The constraint as G(x) >= 0.
    cmat slack(const rvec &x) const
    {
        const cmat f = matrix.eval(x);
        return sense == LmiSense::psd ? f : cmat(-f);
    }
};

struct ScalarConstraint
{
    std::string name;
    AffineScalar expr; ///< expr >= 0
};

struct LogTerm
{
    double weight;
    AffineScalar arg;
};

struct VariableBlock
{
    std::string name;
    std::string kind; ///< "scalar", "hermitian", "complex_vector"
    int offset;
    int count;
    int dim;
};

class ConicProblem
{
  public:
    int add_scalar(const std::string &name)
    {
        blocks_.push_back({name, "scalar", n_, 1, 1});
        return n_++;
    }

    HermitianVar add_hermitian(const std::string &name, int dim)
    {
        HermitianVar v{n_, dim};
        blocks_.push_back({name, "hermitian", n_, v.count(), dim});
        n_ += v.count();
        return v;
    }

    ComplexVectorVar add_complex_vector(const std::string &name, int dim)
    {
        ComplexVectorVar v{n_, dim};
        blocks_.push_back({name, "complex_vector", n_, v.count(), dim});
        n_ += v.count();
        return v;
    }

    void add_log_term(double weight, const AffineScalar &arg)
    {
        require(weight > 0, errc::invalid_argument, "log weights must be positive");
        logs_.push_back({weight, arg});
    }

    void add_linear_objective(const AffineScalar &c) { linear_ += c; }

    void add_lmi(const std::string &name, const AffineMatrix &m, LmiSense sense)
    {
        lmis_.push_back({name, m, sense});
    }

    void add_inequality(const std::string &name, const AffineScalar &expr) { scalars_.push_back({name, expr}); }

    /// Norm bound |x| <= R on the first `count` variables (all when negative).
    void set_ball(double radius, int count = -1)
    {
        ball_radius_ = radius;
        ball_count_ = count;
    }

    int variable_count() const { return n_; }
    int ball_count() const { return ball_count_ < 0 ? n_ : ball_count_; }
    double ball_radius() const { return ball_radius_; }
    const std::vector<LogTerm> &log_terms() const { return logs_; }
    const AffineScalar &linear_objective() const { return linear_; }
    const std::vector<LmiConstraint> &lmis() const { return lmis_; }
    const std::vector<ScalarConstraint> &scalar_constraints() const { return scalars_; }
    const std::vector<VariableBlock> &blocks() const { return blocks_; }

    double objective(const rvec &x) const
    {
        double v = linear_.eval(x);
        for (const auto &l : logs_)
            v += l.weight * std::log(l.arg.eval(x));
        return v;
    }

    /// Barrier parameter count: sum of LMI sizes, scalar constraints and the ball.
    double barrier_degree() const
    {
        double m = static_cast<double>(scalars_.size()) + 1.0;
        for (const auto &l : lmis_)
            m += l.matrix.dim;
        return m;
    }

    /// Plain-text dump: variables, objective, dense constraint blocks.
    void dump(std::ostream &os) const
    {
        os << "variables " << n_ << '\n';
        for (const auto &b : blocks_)
            os << "  " << b.kind << ' ' << b.name << " offset " << b.offset << " count " << b.count << " dim " << b.dim
               << '\n';
        auto dump_affine = [&](const AffineScalar &a) {
            os << format_number(a.constant);
            for (const auto &t : a.terms)
                os << " + " << format_number(t.coeff) << "*x" << t.var;
            os << '\n';
        };
        os << "objective linear ";
        dump_affine(linear_);
        for (const auto &l : logs_)
        {
            os << "objective log " << format_number(l.weight) << " * log(";
            dump_affine(l.arg);
        }
        for (const auto &s : scalars_)
        {
            os << "scalar " << s.name << " >= 0 : ";
            dump_affine(s.expr);
        }
        for (const auto &l : lmis_)
        {
            os << "lmi " << l.name << ' ' << (l.sense == LmiSense::psd ? "psd" : "nsd") << " dim " << l.matrix.dim
               << '\n';
            os << "  constant\n";
            for (int i = 0; i < l.matrix.dim; ++i)
            {
                os << "   ";
                for (int j = 0; j < l.matrix.dim; ++j)
                    os << ' ' << format_number(l.matrix.constant(i, j).real()) << ','
                       << format_number(l.matrix.constant(i, j).imag());
                os << '\n';
            }
            for (const auto &e : l.matrix.entries)
                os << "  x" << e.var << " (" << e.row << ',' << e.col << ") " << format_number(e.coeff.real()) << ','
                   << format_number(e.coeff.imag()) << '\n';
        }
        os << "ball " << format_number(ball_radius_) << " over " << ball_count() << '\n';
    }

  private:
    int n_ = 0;
    std::vector<VariableBlock> blocks_;
    std::vector<LogTerm> logs_;
    AffineScalar linear_;
    std::vector<LmiConstraint> lmis_;
    std::vector<ScalarConstraint> scalars_;
    double ball_radius_ = 1e4;
    int ball_count_ = -1;
};

// ---- solution -------------------------------------------------------------

enum class ConicStatus
{
    optimal,
    infeasible,
    max_iter
};

inline const char *to_string(ConicStatus s)
{
    switch (s)
    {
    case ConicStatus::optimal:
        return "optimal";
    case ConicStatus::infeasible:
        return "infeasible";
    case ConicStatus::max_iter:
        return "max_iter";
    }
    return "unknown";
}

struct ConicResiduals
{
    double primal = 0.0;          ///< worst constraint violation (0 when strictly feasible)
    double dual = 0.0;            ///< worst negative eigenvalue / multiplier of the duals
    double stationarity = 0.0;    ///< inf-norm of the Lagrangian gradient
    double complementarity = 0.0; ///< sum of Tr(Z_j G_j) + z_k g_k
    double objective_error = 0.0; ///< |reported - recomputed objective|
    double min_lmi_eigenvalue = 0.0;
    double min_scalar_slack = 0.0;
    double ball_slack = 0.0; ///< R^2 - |x|^2 relative to R^2
};

struct ConicSolution
{
    rvec x;
    double objective = -std::numeric_limits<double>::infinity();
    ConicStatus status = ConicStatus::max_iter;
    ConicResiduals residuals;
    std::vector<cmat> lmi_duals;  ///< Z_j for G_j(x) >= 0
    rvec scalar_duals;            ///< z_k for g_k(x) >= 0
    double ball_dual = 0.0;
    double duality_gap = 0.0;     ///< barrier bound m / t
    double infeasibility = 0.0;   ///< phase-I lower bound on the smallest constraint shift
    int newton_steps = 0;
};

struct ConicOptions
{
    double t0 = 1.0;
    double t_factor = 10.0;
    double gap_tol = 1e-8;      ///< stop when m / t < gap_tol * max(1, |objective|)
    double newton_tol = 1e-16;  ///< half squared Newton decrement
    int max_newton = 2000;      ///< total Newton steps
    int max_centering = 200;    ///< Newton steps per centering
};

namespace detail
{

/// LMI with entries expanded to both triangles and grouped by variable.
struct CompiledLmi
{
    int dim = 0;
    double sign = 1.0;
    cmat constant;
    std::vector<int> vars;
    std::vector<std::vector<std::tuple<int, int, cplx>>> entries; ///< per var, full Hermitian pattern

    cmat eval(const rvec &x) const
    {
        cmat m = constant;
        for (std::size_t k = 0; k < vars.size(); ++k)
            for (const auto &[r, c, v] : entries[k])
                m(r, c) += v * x(vars[k]);
        return m;
    }
};

inline CompiledLmi compile(const LmiConstraint &l)
{
    CompiledLmi out;
    out.dim = l.matrix.dim;
    out.sign = l.sense == LmiSense::psd ? 1.0 : -1.0;
    out.constant = out.sign * hermitian_part(l.matrix.constant);
    std::map<int, std::size_t> slot;
    for (const auto &e : l.matrix.entries)
    {
        auto it = slot.find(e.var);
        if (it == slot.end())
        {
            it = slot.emplace(e.var, out.vars.size()).first;
            out.vars.push_back(e.var);
            out.entries.emplace_back();
        }
        auto &list = out.entries[it->second];
        const cplx v = out.sign * e.coeff;
        list.emplace_back(e.row, e.col, v);
        if (e.row != e.col)
            list.emplace_back(e.col, e.row, std::conj(v));
    }
    return out;
}

/// Barrier objective  -t f0(x) - sum log det G_j - sum log g_k - log(R^2 - |x_ball|^2).
class Barrier
{
  public:
    explicit Barrier(const ConicProblem &p) : p_(p)
    {
        for (const auto &l : p.lmis())
            lmis_.push_back(compile(l));
    }

    /// Value at x, +inf outside the domain.
    double value(const rvec &x, double t) const
    {
        const double inf = std::numeric_limits<double>::infinity();
        double v = -t * p_.linear_objective().eval(x);
        for (const auto &l : p_.log_terms())
        {
            const double a = l.arg.eval(x);
            if (!(a > 0))
                return inf;
            v -= t * l.weight * std::log(a);
        }
        for (const auto &s : p_.scalar_constraints())
        {
            const double g = s.expr.eval(x);
            if (!(g > 0))
                return inf;
            v -= std::log(g);
        }
        const double b = ball_slack(x);
        if (!(b > 0))
            return inf;
        v -= std::log(b);
        for (const auto &l : lmis_)
        {
            const Eigen::LLT<cmat> llt(l.eval(x));
            if (llt.info() != Eigen::Success)
                return inf;
            const cvec d = llt.matrixL().toDenseMatrix().diagonal();
            double logdet = 0;
            for (Eigen::Index i = 0; i < d.size(); ++i)
            {
                if (!(d(i).real() > 0))
                    return inf;
                logdet += 2.0 * std::log(d(i).real());
            }
            v -= logdet;
        }
        return std::isfinite(v) ? v : inf;
    }

    void derivatives(const rvec &x, double t, rvec &grad, rmat &hess) const
    {
        const int n = p_.variable_count();
        grad = rvec::Zero(n);
        hess = rmat::Zero(n, n);
        for (const auto &t_lin : p_.linear_objective().terms)
            grad(t_lin.var) -= t * t_lin.coeff;
        for (const auto &l : p_.log_terms())
        {
            const double a = l.arg.eval(x);
            for (const auto &ti : l.arg.terms)
            {
                grad(ti.var) -= t * l.weight * ti.coeff / a;
                for (const auto &tj : l.arg.terms)
                    hess(ti.var, tj.var) += t * l.weight * ti.coeff * tj.coeff / (a * a);
            }
        }
        for (const auto &s : p_.scalar_constraints())
        {
            const double g = s.expr.eval(x);
            for (const auto &ti : s.expr.terms)
            {
                grad(ti.var) -= ti.coeff / g;
                for (const auto &tj : s.expr.terms)
                    hess(ti.var, tj.var) += ti.coeff * tj.coeff / (g * g);
            }
        }
        const int nb = p_.ball_count();
        const double b = ball_slack(x);
        const rvec xb = x.head(nb);
        grad.head(nb) += 2.0 * xb / b;
        hess.topLeftCorner(nb, nb) += 2.0 * rmat::Identity(nb, nb) / b + 4.0 * xb * xb.transpose() / (b * b);

        for (const auto &l : lmis_)
        {
            const cmat f = l.eval(x);
            const Eigen::LLT<cmat> llt(f);
            const cmat finv = llt.solve(cmat::Identity(l.dim, l.dim));
            const auto k = l.vars.size();
            std::vector<cmat> h(k);
            for (std::size_t a = 0; a < k; ++a)
            {
                // F^{-1} F_a F^{-1} through the sparse pattern of F_a.
                cmat tmp = cmat::Zero(l.dim, l.dim);
                double g = 0.0;
                for (const auto &[r, c, v] : l.entries[a])
                {
                    tmp.row(r) += v * finv.row(c);
                    g += (finv(c, r) * v).real();
                }
                h[a] = finv * tmp;
                grad(l.vars[a]) -= g;
            }
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t bidx = a; bidx < k; ++bidx)
                {
                    double s = 0.0;
                    for (const auto &[r, c, v] : l.entries[bidx])
                        s += (h[a](c, r) * v).real();
                    hess(l.vars[a], l.vars[bidx]) += s;
                    if (bidx != a)
                        hess(l.vars[bidx], l.vars[a]) += s;
                }
        }
    }

    double ball_slack(const rvec &x) const
    {
        const double r = p_.ball_radius();
        return r * r - x.head(p_.ball_count()).squaredNorm();
    }

    const std::vector<CompiledLmi> &lmis() const { return lmis_; }

  private:
    const ConicProblem &p_;
    std::vector<CompiledLmi> lmis_;
};

struct PathResult
{
    rvec x;
    double t = 0;
    int newton_steps = 0;
    bool converged = false;
};

/// Path following from a strictly feasible x0. `early_exit` is polled after
/// every Newton step and ends the run when it returns true.
inline PathResult follow_path(const ConicProblem &p, rvec x, const ConicOptions &opt,
                              const std::function<bool(const rvec &, double)> &early_exit = {})
{
    const Barrier barrier(p);
    const double m = p.barrier_degree();
    PathResult res;
    double t = opt.t0;
    rvec grad;
    rmat hess;
    require(std::isfinite(barrier.value(x, t)), errc::internal_consistency, "path start is not strictly feasible");

    for (;;)
    {
        int steps = 0;
        for (; steps < opt.max_centering && res.newton_steps < opt.max_newton; ++steps)
        {
            barrier.derivatives(x, t, grad, hess);
            const Eigen::LDLT<rmat> ldlt(hess);
            rvec dx = ldlt.solve(-grad);
            if (!dx.allFinite())
                dx = -grad / std::max(1.0, hess.diagonal().maxCoeff());
            const double decrement = -grad.dot(dx);
            ++res.newton_steps;
            if (decrement / 2.0 <= opt.newton_tol)
                break;
            const double f0 = barrier.value(x, t);
            double step = 1.0;
            bool moved = false;
            // Quadratic region of a self-concordant barrier: take the full step,
            // since value differences drown in rounding at large t.
            if (decrement < 0.25 && std::isfinite(barrier.value(x + dx, t)))
            {
                x += dx;
                moved = true;
            }
            for (int bt = 0; bt < 80 && !moved; ++bt)
            {
                const rvec trial = x + step * dx;
                const double f1 = barrier.value(trial, t);
                if (std::isfinite(f1) && f1 <= f0 - 0.01 * step * decrement)
                {
                    x = trial;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (early_exit && early_exit(x, t))
            {
                res.x = x;
                res.t = t;
                res.converged = true;
                return res;
            }
            if (!moved)
                break; // no progress at machine precision; treat as centered
        }
        const double obj = p.objective(x);
        res.x = x;
        res.t = t;
        if (m / t < opt.gap_tol * std::max(1.0, std::abs(obj)))
        {
            res.converged = true;
            return res;
        }
        if (res.newton_steps >= opt.max_newton)
            return res;
        t *= opt.t_factor;
    }
}

} // namespace detail

/// Recomputes every residual of a candidate solution from the problem data.
inline ConicResiduals audit(const ConicProblem &p, const ConicSolution &s)
{
    ConicResiduals r;
    const rvec &x = s.x;
    const int n = p.variable_count();
    require(x.size() == n, errc::dimension_mismatch, "solution length differs from the variable count");

    r.min_lmi_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto &l : p.lmis())
        r.min_lmi_eigenvalue = std::min(r.min_lmi_eigenvalue, min_eigenvalue(l.slack(x)));
    if (p.lmis().empty())
        r.min_lmi_eigenvalue = 0.0;
    r.min_scalar_slack = std::numeric_limits<double>::infinity();
    for (const auto &c : p.scalar_constraints())
        r.min_scalar_slack = std::min(r.min_scalar_slack, c.expr.eval(x));
    double min_log_arg = std::numeric_limits<double>::infinity();
    for (const auto &l : p.log_terms())
        min_log_arg = std::min(min_log_arg, l.arg.eval(x));
    if (p.scalar_constraints().empty())
        r.min_scalar_slack = 0.0;
    const double radius2 = p.ball_radius() * p.ball_radius();
    r.ball_slack = (radius2 - x.head(p.ball_count()).squaredNorm()) / radius2;
    r.primal = std::max({0.0, -r.min_lmi_eigenvalue, -r.min_scalar_slack, -r.ball_slack * radius2});
    if (std::isfinite(min_log_arg) && !(min_log_arg > 0))
        r.primal = std::max(r.primal, std::abs(min_log_arg) + 1.0);

    const double recomputed = p.objective(x);
    r.objective_error = std::isfinite(recomputed) ? std::abs(recomputed - s.objective) : std::numeric_limits<double>::infinity();

    if (s.lmi_duals.size() != p.lmis().size() || s.scalar_duals.size() != static_cast<Eigen::Index>(p.scalar_constraints().size()))
    {
        r.dual = r.stationarity = r.complementarity = std::numeric_limits<double>::infinity();
        return r;
    }

    // Lagrangian gradient: grad f0 + sum A_j^*(Z_j) + sum z_k grad g_k - 2 z_ball x.
    rvec lag = rvec::Zero(n);
    for (const auto &t : p.linear_objective().terms)
        lag(t.var) += t.coeff;
    for (const auto &l : p.log_terms())
    {
        const double a = l.arg.eval(x);
        for (const auto &t : l.arg.terms)
            lag(t.var) += l.weight * t.coeff / a;
    }
    for (std::size_t j = 0; j < p.lmis().size(); ++j)
    {
        const auto &l = p.lmis()[j];
        const cmat &z = s.lmi_duals[j];
        const double sign = l.sense == LmiSense::psd ? 1.0 : -1.0;
        r.dual = std::max(r.dual, -min_eigenvalue(z));
        r.complementarity += std::abs((z * l.slack(x)).trace().real());
        for (const auto &e : l.matrix.entries)
        {
            double contrib = (z(e.col, e.row) * e.coeff).real();
            if (e.row != e.col)
                contrib += (z(e.row, e.col) * std::conj(e.coeff)).real();
            lag(e.var) += sign * contrib;
        }
    }
    for (std::size_t k = 0; k < p.scalar_constraints().size(); ++k)
    {
        const double z = s.scalar_duals(static_cast<Eigen::Index>(k));
        r.dual = std::max(r.dual, -z);
        const auto &c = p.scalar_constraints()[k];
        r.complementarity += std::abs(z * c.expr.eval(x));
        for (const auto &t : c.expr.terms)
            lag(t.var) += z * t.coeff;
    }
    r.dual = std::max(r.dual, -s.ball_dual);
    r.complementarity += std::abs(s.ball_dual * r.ball_slack * radius2);
    lag.head(p.ball_count()) -= 2.0 * s.ball_dual * x.head(p.ball_count());
    r.stationarity = lag.size() ? lag.cwiseAbs().maxCoeff() : 0.0;
    return r;
}

namespace detail
{

/// Phase I: maximize -s subject to G_j + s I >= 0, g_k + s >= 0, a_k + s >= 0, s >= -1.
inline ConicProblem phase_one_problem(const ConicProblem &p, int &s_index)
{
    ConicProblem q;
    // Same variable layout, then s.
    for (const auto &b : p.blocks())
    {
        if (b.kind == "scalar")
            q.add_scalar(b.name);
        else if (b.kind == "hermitian")
            q.add_hermitian(b.name, b.dim);
        else
            q.add_complex_vector(b.name, b.dim);
    }
    s_index = q.add_scalar("phase1_shift");
    q.add_linear_objective(AffineScalar().add(s_index, -1.0));
    for (const auto &l : p.lmis())
    {
        AffineMatrix m = l.matrix;
        const double sign = l.sense == LmiSense::psd ? 1.0 : -1.0;
        for (int i = 0; i < m.dim; ++i)
            m.add(s_index, i, i, sign);
        q.add_lmi(l.name, m, l.sense);
    }
    for (const auto &c : p.scalar_constraints())
    {
        AffineScalar e = c.expr;
        q.add_inequality(c.name, e.add(s_index, 1.0));
    }
    for (std::size_t k = 0; k < p.log_terms().size(); ++k)
    {
        AffineScalar e = p.log_terms()[k].arg;
        q.add_inequality("log_domain_" + std::to_string(k), e.add(s_index, 1.0));
    }
    q.add_inequality("phase1_floor", AffineScalar(1.0).add(s_index, 1.0));
    q.set_ball(p.ball_radius(), p.ball_count());
    return q;
}

inline double most_violated(const ConicProblem &p, const rvec &x)
{
    double worst = std::numeric_limits<double>::infinity();
    for (const auto &l : p.lmis())
        worst = std::min(worst, min_eigenvalue(l.slack(x)));
    for (const auto &c : p.scalar_constraints())
        worst = std::min(worst, c.expr.eval(x));
    for (const auto &l : p.log_terms())
        worst = std::min(worst, l.arg.eval(x));
    return worst;
}

} // namespace detail

/// Solves the problem from the optional starting point x0 (used when strictly feasible).
inline ConicSolution solve(const ConicProblem &p, const ConicOptions &opt = {}, const rvec *x0 = nullptr)
{
    const int n = p.variable_count();
    ConicSolution sol;
    rvec start = (x0 && x0->size() == n) ? *x0 : rvec::Zero(n);
    const double r = p.ball_radius();
    if (start.head(p.ball_count()).squaredNorm() >= 0.25 * r * r)
        start.setZero();

    const detail::Barrier barrier(p);
    if (!std::isfinite(barrier.value(start, 1.0)))
    {
        int s_index = 0;
        const ConicProblem q = detail::phase_one_problem(p, s_index);
        rvec y(n + 1);
        y.head(n) = start;
        y(n) = std::max(0.0, -detail::most_violated(p, start)) + 1.0;
        // Stop once the shift is safely negative: x is then strictly feasible.
        auto feasible_enough = [&](const rvec &v, double) {
            return v(s_index) < -1e-6 && std::isfinite(barrier.value(v.head(n), 1.0));
        };
        ConicOptions o1 = opt;
        o1.gap_tol = 1e-12;
        const auto ph1 = detail::follow_path(q, y, o1, feasible_enough);
        sol.newton_steps += ph1.newton_steps;
        const double shift = ph1.x(s_index);
        if (!feasible_enough(ph1.x, ph1.t))
        {
            // Barrier bound: the best achievable shift is at least s - m/t.
            sol.x = ph1.x.head(n);
            sol.status = ConicStatus::infeasible;
            sol.infeasibility = shift - q.barrier_degree() / ph1.t;
            sol.objective = std::numeric_limits<double>::quiet_NaN();
            sol.residuals = audit(p, sol);
            return sol;
        }
        start = ph1.x.head(n);
    }

    const auto path = detail::follow_path(p, start, opt);
    sol.newton_steps += path.newton_steps;
    sol.x = path.x;
    sol.objective = p.objective(path.x);
    sol.status = path.converged ? ConicStatus::optimal : ConicStatus::max_iter;
    sol.duality_gap = p.barrier_degree() / path.t;

    // Central-path duals.
    const double t = path.t;
    for (const auto &l : p.lmis())
    {
        const cmat g = l.slack(path.x);
        sol.lmi_duals.push_back(hermitian_part(g.llt().solve(cmat::Identity(g.rows(), g.cols()))) / t);
    }
    sol.scalar_duals.resize(static_cast<Eigen::Index>(p.scalar_constraints().size()));
    for (std::size_t k = 0; k < p.scalar_constraints().size(); ++k)
        sol.scalar_duals(static_cast<Eigen::Index>(k)) = 1.0 / (t * p.scalar_constraints()[k].expr.eval(path.x));
    sol.ball_dual = 1.0 / (t * barrier.ball_slack(path.x));
    sol.residuals = audit(p, sol);
    return sol;
}

} // namespace fdsec

#endif // FDSEC_CONIC_HPP
