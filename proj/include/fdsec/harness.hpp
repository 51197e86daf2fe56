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
// Monte Carlo experiment drivers and long-format result tables.

#ifndef FDSEC_HARNESS_HPP
#define FDSEC_HARNESS_HPP

#include "adc.hpp"
#include "baselines.hpp"
#include "robust.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace fdsec
{

enum class ExperimentKind
{
    convergence,
    sweep_power,
    sweep_antennas,
    robust_exact_moment,
    robust_uncertain_moment,
    outage_per_channel
};

inline constexpr std::array<ExperimentKind, 6> all_experiment_kinds{
    ExperimentKind::convergence,         ExperimentKind::sweep_power,
    ExperimentKind::sweep_antennas,      ExperimentKind::robust_exact_moment,
    ExperimentKind::robust_uncertain_moment, ExperimentKind::outage_per_channel};

inline const char *to_string(ExperimentKind k)
{
    switch (k)
    {
    case ExperimentKind::convergence:
        return "convergence";
    case ExperimentKind::sweep_power:
        return "sweep_power";
    case ExperimentKind::sweep_antennas:
        return "sweep_antennas";
    case ExperimentKind::robust_exact_moment:
        return "robust_exact_moment";
    case ExperimentKind::robust_uncertain_moment:
        return "robust_uncertain_moment";
    case ExperimentKind::outage_per_channel:
        return "outage_per_channel";
    }
    return "unknown";
}

inline ExperimentKind parse_experiment_kind(const std::string &s)
{
    for (auto k : all_experiment_kinds)
        if (s == to_string(k))
            return k;
    throw error(errc::config, "unknown experiment kind '" + s + "'");
}

inline bool is_robust_kind(ExperimentKind k)
{
    return k == ExperimentKind::robust_exact_moment || k == ExperimentKind::robust_uncertain_moment ||
           k == ExperimentKind::outage_per_channel;
}

/// RNG streams split from the master seed; the index is the trial number.
namespace stream
{
inline constexpr std::uint64_t channels = 1;
inline constexpr std::uint64_t eve_draws = 2;
inline constexpr std::uint64_t moment_perturbation = 3;
} // namespace stream

struct ExperimentConfig
{
    ExperimentKind kind = ExperimentKind::sweep_power;

    // System at the nominal operating point (unit noise floor unless overridden).
    int n_tx = 4;
    double power_db = 5.0;
    double zeta = 0.01;
    double sigma_a2 = 1.0, sigma_b2 = 1.0, sigma_e2 = 1.0;

    // Sweep grids.
    std::vector<double> power_grid_db{0.0, 5.0, 10.0, 15.0};
    std::vector<int> antenna_grid{3, 4, 6, 8};
    std::vector<double> zeta_grid{0.01, 0.1};

    int trials = 200;
    std::uint64_t seed = 1;
    int threads = 0; ///< 0: hardware concurrency

    AdcOptions adc;

    // Robust design and verification.
    double epsilon = 0.05;
    double mean_scale = 0.01; ///< xi = mean_scale (1 + j) 1_N
    double rho = 0.002;       ///< Omega = xi xi^H + rho I
    double tau1 = 0.05, tau2 = 0.05;
    int instances = 20;
    int draws_per_family = 100000;
    int histogram_bins = 50;

    void validate() const
    {
        require(n_tx >= 1, errc::config, "n_tx must be >= 1");
        require(zeta > 0 && zeta < 1, errc::config, "zeta must lie in (0,1)");
        require(sigma_a2 > 0 && sigma_b2 > 0 && sigma_e2 > 0, errc::config, "noise powers must be positive");
        require(!power_grid_db.empty() && !antenna_grid.empty() && !zeta_grid.empty(), errc::config,
                "sweep grids must be nonempty");
        for (int n : antenna_grid)
            require(n >= 2, errc::config, "antenna grid entries must be >= 2 (zero forcing needs a null space)");
        for (double z : zeta_grid)
            require(z > 0 && z < 1, errc::config, "zeta grid entries must lie in (0,1)");
        require(trials >= 1 && instances >= 1, errc::config, "trial counts must be >= 1");
        require(threads >= 0, errc::config, "threads must be >= 0");
        require(adc.tol > 0 && adc.max_iter >= 1, errc::config, "invalid ADC options");
        require(epsilon > 0 && epsilon < 1, errc::config, "epsilon must lie in (0,1)");
        require(mean_scale >= 0 && rho >= 0 && tau1 >= 0 && tau2 >= 0, errc::config,
                "moment parameters must be nonnegative");
        require(draws_per_family >= 1 && histogram_bins >= 1, errc::config, "draw and bin counts must be >= 1");
    }

    SystemParams system(int n, double p_db, double z) const
    {
        SystemParams p = SystemParams::symmetric(n, p_db, z);
        p.sigma_a2 = sigma_a2;
        p.sigma_b2 = sigma_b2;
        p.sigma_e2 = sigma_e2;
        return p;
    }

    SystemParams system() const { return system(n_tx, power_db, zeta); }

    MomentModel moments(double t1, double t2) const
    {
        return MomentModel::symmetric(n_tx, mean_scale, rho, t1, t2, epsilon);
    }
};

struct ResultRecord
{
    std::string experiment, method, sweep;
    int trial = 0;
    std::string metric;
    double value = 0.0;
};

struct HistogramRecord
{
    std::string experiment, method;
    int trial = 0;
    std::string family;
    double bin_left = 0.0, bin_right = 0.0;
    long count = 0;
    double r_s = 0.0;
};

struct ResultTable
{
    std::vector<ResultRecord> records;
    std::vector<HistogramRecord> histograms;

    static constexpr const char *csv_header = "experiment,method,sweep,trial,metric,value";
    static constexpr const char *histogram_header = "experiment,method,trial,family,bin_left,bin_right,count,r_s";

    void add(std::string experiment, std::string method, std::string sweep, int trial, std::string metric,
             double value)
    {
        require(std::isfinite(value), errc::internal_consistency, "non-finite metric " + metric);
        records.push_back({std::move(experiment), std::move(method), std::move(sweep), trial, std::move(metric), value});
    }

    void append(const ResultTable &other)
    {
        records.insert(records.end(), other.records.begin(), other.records.end());
        histograms.insert(histograms.end(), other.histograms.begin(), other.histograms.end());
    }

    void write_csv(std::ostream &os) const
    {
        os << csv_header << '\n';
        for (const auto &r : records)
            os << r.experiment << ',' << r.method << ',' << r.sweep << ',' << r.trial << ',' << r.metric << ','
               << format_number(r.value) << '\n';
    }

    void write_histogram_csv(std::ostream &os) const
    {
        os << histogram_header << '\n';
        for (const auto &h : histograms)
            os << h.experiment << ',' << h.method << ',' << h.trial << ',' << h.family << ','
               << format_number(h.bin_left) << ',' << format_number(h.bin_right) << ',' << h.count << ','
               << format_number(h.r_s) << '\n';
    }

    /// Values of one (method, sweep, metric) cell in record order.
    std::vector<double> values(const std::string &method, const std::string &sweep, const std::string &metric) const
    {
        std::vector<double> v;
        for (const auto &r : records)
            if (r.method == method && r.sweep == sweep && r.metric == metric)
                v.push_back(r.value);
        return v;
    }

    double mean(const std::string &method, const std::string &sweep, const std::string &metric) const
    {
        const auto v = values(method, sweep, metric);
        require(!v.empty(), errc::invalid_argument, "no records for " + method + "/" + sweep + "/" + metric);
        double s = 0.0;
        for (double x : v)
            s += x;
        return s / static_cast<double>(v.size());
    }
};

namespace detail
{

/// Runs body(k) for k in [0, count) on worker threads; tables are merged in index order.
inline ResultTable parallel_trials(int count, int threads, const std::function<ResultTable(int)> &body)
{
    std::vector<ResultTable> parts(static_cast<std::size_t>(count));
    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, count);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (int k = next++; k < count; k = next++)
        {
            try
            {
                parts[static_cast<std::size_t>(k)] = body(k);
            }
            catch (...)
            {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    if (workers <= 1)
        work();
    else
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }
    if (failure)
        std::rethrow_exception(failure);
    ResultTable out;
    for (const auto &p : parts)
        out.append(p);
    return out;
}

/// Runs a method; a library error becomes a status record and the run continues.
inline bool guarded(ResultTable &t, const std::string &experiment, const std::string &method, const std::string &sweep,
                    int trial, const std::function<void()> &body)
{
    try
    {
        body();
        t.add(experiment, method, sweep, trial, "status", 0.0);
        return true;
    }
    catch (const error &e)
    {
        t.add(experiment, method, sweep, trial, "status", 1.0 + static_cast<double>(e.code()));
        return false;
    }
}

inline ChannelSet trial_channels(const ExperimentConfig &cfg, const SystemParams &p, int trial)
{
    return sample_channels(derive_seed(cfg.seed, stream::channels, static_cast<std::uint64_t>(trial)), p);
}

inline void add_rates(ResultTable &t, const std::string &ex, const std::string &method, const std::string &sweep,
                      int trial, const RateSet &r)
{
    t.add(ex, method, sweep, trial, "ssr", r.ssr);
    t.add(ex, method, sweep, trial, "r_a", r.r_a);
    t.add(ex, method, sweep, trial, "r_b", r.r_b);
    t.add(ex, method, sweep, trial, "r_e", r.r_e);
}

/// FD-DC, FD-ZF and HD-DC on one channel draw.
inline ResultTable compare_methods(const ExperimentConfig &cfg, const std::string &ex, const std::string &suffix,
                                   const std::string &sweep, int trial, const SystemParams &p)
{
    ResultTable t;
    const auto ch = trial_channels(cfg, p, trial);
    guarded(t, ex, "fd_dc" + suffix, sweep, trial, [&] {
        const auto r = solve_fd_dc(ch, p, cfg.adc);
        add_rates(t, ex, "fd_dc" + suffix, sweep, trial, r.rates);
        t.add(ex, "fd_dc" + suffix, sweep, trial, "iterations", r.adc.iterations);
    });
    guarded(t, ex, "fd_zf" + suffix, sweep, trial, [&] {
        const auto r = baseline_fd_zf(ch, p);
        add_rates(t, ex, "fd_zf" + suffix, sweep, trial, r.rates);
        const double leak =
            std::max(quad_form(ch.h_aa, r.q.q_a) / p.p_a, quad_form(ch.h_bb, r.q.q_b) / p.p_b);
        t.add(ex, "fd_zf" + suffix, sweep, trial, "si_leak_rel", leak);
    });
    guarded(t, ex, "hd_dc" + suffix, sweep, trial, [&] {
        const auto r = baseline_hd(ch, p);
        t.add(ex, "hd_dc" + suffix, sweep, trial, "ssr", r.ssr);
        t.add(ex, "hd_dc" + suffix, sweep, trial, "r_ab", r.a_to_b.r_link);
        t.add(ex, "hd_dc" + suffix, sweep, trial, "r_ba", r.b_to_a.r_link);
        t.add(ex, "hd_dc" + suffix, sweep, trial, "r_e_a", r.a_to_b.r_eve);
        t.add(ex, "hd_dc" + suffix, sweep, trial, "r_e_b", r.b_to_a.r_eve);
    });
    return t;
}

/// Outage rows of one design: per family, then the worst family and r_s under sweep "all".
inline void add_outage(ResultTable &t, const ExperimentConfig &cfg, const std::string &ex, const std::string &method,
                       int trial, const std::vector<OutageReport> &reports, bool keep_histogram)
{
    for (const auto &r : reports)
    {
        t.add(ex, method, to_string(r.family), trial, "outage_rate", r.outage_rate);
        if (keep_histogram)
            for (const auto &b : histogram(r, cfg.histogram_bins))
                t.histograms.push_back({ex, method, trial, to_string(r.family), b.left, b.right, b.count, r.r_s});
    }
    const double worst = worst_outage(reports);
    t.add(ex, method, "all", trial, "r_s", reports.empty() ? 0.0 : reports.front().r_s);
    t.add(ex, method, "all", trial, "worst_outage", worst);
    t.add(ex, method, "all", trial, "violates_epsilon", worst > cfg.epsilon ? 1.0 : 0.0);
}

inline void add_robust_design(ResultTable &t, const std::string &ex, const std::string &method, int trial,
                              const RobustResult &r)
{
    t.add(ex, method, "all", trial, "dc_iterations", r.iterations);
    t.add(ex, method, "all", trial, "nu_e", r.variables.nu_e);
    t.add(ex, method, "all", trial, "audit_pass", r.audit.passes() ? 1.0 : 0.0);
    t.add(ex, method, "all", trial, "lmi_max_eig", std::max(r.audit.lmi1_max_eig, r.audit.lmi2_max_eig));
    t.add(ex, method, "all", trial, "budget_slack", r.audit.budget_slack);
}

inline std::uint64_t draw_seed(const ExperimentConfig &cfg, int trial)
{
    return derive_seed(cfg.seed, stream::eve_draws, static_cast<std::uint64_t>(trial));
}

/// Example with exact moments: robust design versus the mean-channel design, sampled at the nominal moments.
inline ResultTable exact_moment_trial(const ExperimentConfig &cfg, const std::string &ex, int trial, bool histograms)
{
    ResultTable t;
    const auto p = cfg.system();
    const auto mm = cfg.moments(0.0, 0.0);
    const auto ch = trial_channels(cfg, p, trial);
    guarded(t, ex, "robust", "all", trial, [&] {
        const auto r = robust_dc_solve(ch, p, mm);
        add_robust_design(t, ex, "robust", trial, r);
        add_outage(t, cfg, ex, "robust", trial,
                   verify_outage_all(r.q(), r.r_s, ch, p, mm, draw_seed(cfg, trial), cfg.draws_per_family), histograms);
    });
    guarded(t, ex, "nonrobust", "all", trial, [&] {
        const auto nb = nonrobust_baseline(ch, p, mm);
        add_outage(t, cfg, ex, "nonrobust", trial,
                   verify_outage_all(nb.q, nb.r_s, ch, p, mm, draw_seed(cfg, trial), cfg.draws_per_family), histograms);
    });
    return t;
}

/// Example with moment uncertainty: tau-aware versus tau = 0 design, sampled at perturbed moments.
inline ResultTable uncertain_moment_trial(const ExperimentConfig &cfg, const std::string &ex, int trial,
                                          bool histograms)
{
    ResultTable t;
    const auto p = cfg.system();
    const auto mm = cfg.moments(cfg.tau1, cfg.tau2);
    const auto mm0 = cfg.moments(0.0, 0.0);
    const auto ch = trial_channels(cfg, p, trial);
    const auto sampling =
        perturb_moments(mm, derive_seed(cfg.seed, stream::moment_perturbation, static_cast<std::uint64_t>(trial)));
    for (const auto &[method, design] : {std::pair{"robust_tau", &mm}, std::pair{"robust_tau0", &mm0}})
        guarded(t, ex, method, "all", trial, [&] {
            const auto r = robust_dc_solve(ch, p, *design);
            add_robust_design(t, ex, method, trial, r);
            add_outage(t, cfg, ex, method, trial,
                       verify_outage_all(r.q(), r.r_s, ch, p, sampling, draw_seed(cfg, trial), cfg.draws_per_family),
                       histograms);
        });
    return t;
}

} // namespace detail

inline ResultTable run_convergence(const ExperimentConfig &cfg)
{
    const std::string ex = "convergence";
    const auto p = cfg.system();
    return detail::parallel_trials(cfg.trials, cfg.threads, [&](int k) {
        ResultTable t;
        const auto ch = detail::trial_channels(cfg, p, k);
        detail::guarded(t, ex, "fd_dc", "all", k, [&] {
            const auto r = solve_fd_dc(ch, p, cfg.adc);
            for (const auto &it : r.adc.trace.iterates)
            {
                const auto sweep = std::to_string(it.iter);
                t.add(ex, "fd_dc", sweep, k, "objective", it.objective);
                t.add(ex, "fd_dc", sweep, k, "ssr", std::max(0.0, it.objective));
                t.add(ex, "fd_dc", sweep, k, "r_a", it.r_a);
                t.add(ex, "fd_dc", sweep, k, "r_b", it.r_b);
                t.add(ex, "fd_dc", sweep, k, "r_e", it.r_e);
            }
            t.add(ex, "fd_dc", "all", k, "iterations", r.adc.iterations);
            t.add(ex, "fd_dc", "all", k, "converged", r.adc.converged ? 1.0 : 0.0);
        });
        return t;
    });
}

/// Methods are tagged with the SI factor ("fd_dc@zeta=0.01"); sweep is the power in dB.
inline ResultTable run_sweep_power(const ExperimentConfig &cfg)
{
    const std::string ex = "sweep_power";
    ResultTable out;
    for (double z : cfg.zeta_grid)
        for (double pdb : cfg.power_grid_db)
        {
            const auto p = cfg.system(cfg.n_tx, pdb, z);
            out.append(detail::parallel_trials(cfg.trials, cfg.threads, [&](int k) {
                return detail::compare_methods(cfg, ex, "@zeta=" + format_number(z), format_number(pdb), k, p);
            }));
        }
    return out;
}

/// Sweep is the antenna count at the nominal power and SI factor.
inline ResultTable run_sweep_antennas(const ExperimentConfig &cfg)
{
    const std::string ex = "sweep_antennas";
    ResultTable out;
    for (int n : cfg.antenna_grid)
    {
        const auto p = cfg.system(n, cfg.power_db, cfg.zeta);
        out.append(detail::parallel_trials(cfg.trials, cfg.threads, [&](int k) {
            return detail::compare_methods(cfg, ex, "", std::to_string(n), k, p);
        }));
    }
    return out;
}

inline ResultTable run_robust_exact_moment(const ExperimentConfig &cfg)
{
    return detail::parallel_trials(cfg.instances, cfg.threads, [&](int k) {
        return detail::exact_moment_trial(cfg, "robust_exact_moment", k, k == 0);
    });
}

inline ResultTable run_robust_uncertain_moment(const ExperimentConfig &cfg)
{
    return detail::parallel_trials(cfg.instances, cfg.threads, [&](int k) {
        return detail::uncertain_moment_trial(cfg, "robust_uncertain_moment", k, k == 0);
    });
}

/// Per-channel worst-family outage for both robustness examples.
inline ResultTable run_outage_per_channel(const ExperimentConfig &cfg)
{
    const std::string ex = "outage_per_channel";
    return detail::parallel_trials(cfg.instances, cfg.threads, [&](int k) {
        ResultTable t = detail::exact_moment_trial(cfg, ex, k, false);
        t.append(detail::uncertain_moment_trial(cfg, ex, k, false));
        return t;
    });
}

inline ResultTable run_experiment(const ExperimentConfig &cfg)
{
    cfg.validate();
    switch (cfg.kind)
    {
    case ExperimentKind::convergence:
        return run_convergence(cfg);
    case ExperimentKind::sweep_power:
        return run_sweep_power(cfg);
    case ExperimentKind::sweep_antennas:
        return run_sweep_antennas(cfg);
    case ExperimentKind::robust_exact_moment:
        return run_robust_exact_moment(cfg);
    case ExperimentKind::robust_uncertain_moment:
        return run_robust_uncertain_moment(cfg);
    case ExperimentKind::outage_per_channel:
        return run_outage_per_channel(cfg);
    }
    throw error(errc::config, "unhandled experiment kind");
}

} // namespace fdsec

#endif // FDSEC_HARNESS_HPP
