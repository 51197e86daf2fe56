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
// Command line front end. Exit codes: 0 success, 1 internal error, 2 usage or
// config error, 3 infeasible robust design.

#ifndef FDSEC_CLI_HPP
#define FDSEC_CLI_HPP

#include "config_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace fdsec
{

inline constexpr int exit_ok = 0;
inline constexpr int exit_internal = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_infeasible = 3;

inline int exit_code(errc code)
{
    switch (code)
    {
    case errc::config:
    case errc::invalid_argument:
    case errc::dimension_mismatch:
        return exit_usage;
    case errc::infeasible:
        return exit_infeasible;
    default:
        return exit_internal;
    }
}

namespace detail
{

struct CliArgs
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out_dir;
    std::string format = "csv";
};

/// Single robust design on one channel draw, reported with its feasibility audit.
inline ResultTable robust_solve_table(const ExperimentConfig &cfg)
{
    const std::string ex = "robust_solve";
    const auto p = cfg.system();
    const auto mm = cfg.moments(cfg.tau1, cfg.tau2);
    const auto ch = trial_channels(cfg, p, 0);
    const auto r = robust_dc_solve(ch, p, mm);
    ResultTable t;
    t.add(ex, "robust", "all", 0, "r_s", r.r_s);
    add_robust_design(t, ex, "robust", 0, r);
    t.add(ex, "robust", "all", 0, "power_a", trace_real(r.variables.q_a));
    t.add(ex, "robust", "all", 0, "power_b", trace_real(r.variables.q_b));
    t.add(ex, "robust", "all", 0, "alpha_over_mu", r.audit.alpha_over_mu);
    return t;
}

inline void emit(const ResultTable &t, const std::string &name, const CliArgs &a, std::ostream &out)
{
    auto write = [&](std::ostream &os) {
        if (a.format == "json")
            write_json(os, t);
        else
            t.write_csv(os);
    };
    if (a.out_dir.empty())
    {
        write(out);
        return;
    }
    std::filesystem::create_directories(a.out_dir);
    const auto base = std::filesystem::path(a.out_dir) / name;
    std::ofstream f(base.string() + "." + a.format);
    require(f.good(), errc::config, "cannot write to '" + a.out_dir + "'");
    write(f);
    if (!t.histograms.empty())
    {
        std::ofstream h(base.string() + "_histogram.csv");
        t.write_histogram_csv(h);
    }
}

inline ExperimentConfig resolve_config(const CliArgs &a)
{
    ExperimentConfig cfg = a.config_path.empty() ? ExperimentConfig{} : load_config(a.config_path);
    if (a.seed)
        cfg.seed = *a.seed;
    if (a.trials)
    {
        cfg.trials = *a.trials;
        cfg.instances = *a.trials;
    }
    cfg.validate();
    return cfg;
}

} // namespace detail

/// Entry point shared by the executable and the tests.
inline int cli_main(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
    CLI::App app{"Sum-secrecy-rate transmit design for full-duplex bidirectional links", "fdsec_cli"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    detail::CliArgs a;
    std::uint64_t seed = 0;
    int trials = 0;
    app.add_option("--config", a.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    auto *seed_opt = app.add_option("--seed", seed, "master RNG seed (overrides the config)");
    auto *trials_opt =
        app.add_option("--trials", trials, "trial / instance count (overrides the config)")->check(CLI::PositiveNumber);
    app.add_option("--out", a.out_dir, "output directory (default: stdout)");
    app.add_option("--format", a.format, "output format")->check(CLI::IsMember({"csv", "json"}));

    auto *solve = app.add_subcommand("solve", "FD-DC, FD-ZF and HD-DC on one channel draw");
    auto *convergence = app.add_subcommand("convergence", "ADC objective and rates per iteration");
    auto *sweep_power = app.add_subcommand("sweep-power", "secrecy rate versus transmit power");
    auto *sweep_antennas = app.add_subcommand("sweep-antennas", "secrecy rate versus antenna count");
    auto *robust_solve = app.add_subcommand("robust-solve", "robust design on one channel draw");
    auto *robust_eval = app.add_subcommand("robust-eval", "Monte Carlo outage verification of robust designs");
    auto *gen_config = app.add_subcommand("gen-config", "write a template config");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &)
    {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::ParseError &e)
    {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_usage;
    }
    if (*seed_opt)
        a.seed = seed;
    if (*trials_opt)
        a.trials = trials;

    try
    {
        if (gen_config->parsed())
        {
            const auto text = config_template();
            if (a.out_dir.empty())
                out << text;
            else
            {
                std::filesystem::create_directories(a.out_dir);
                std::ofstream f(std::filesystem::path(a.out_dir) / "config.json");
                require(f.good(), errc::config, "cannot write to '" + a.out_dir + "'");
                f << text;
            }
            return exit_ok;
        }
        ExperimentConfig cfg = detail::resolve_config(a);
        if (solve->parsed())
        {
            detail::emit(detail::compare_methods(cfg, "solve", "", "all", 0, cfg.system()), "solve", a, out);
            return exit_ok;
        }
        if (robust_solve->parsed())
        {
            detail::emit(detail::robust_solve_table(cfg), "robust_solve", a, out);
            return exit_ok;
        }
        if (convergence->parsed())
            cfg.kind = ExperimentKind::convergence;
        else if (sweep_power->parsed())
            cfg.kind = ExperimentKind::sweep_power;
        else if (sweep_antennas->parsed())
            cfg.kind = ExperimentKind::sweep_antennas;
        else if (robust_eval->parsed() && !is_robust_kind(cfg.kind))
            cfg.kind = ExperimentKind::robust_exact_moment;
        detail::emit(run_experiment(cfg), to_string(cfg.kind), a, out);
        return exit_ok;
    }
    catch (const error &e)
    {
        err << "error: " << e.what() << "\n";
        return exit_code(e.code());
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << "\n";
        return exit_internal;
    }
}

} // namespace fdsec

#endif // FDSEC_CLI_HPP
