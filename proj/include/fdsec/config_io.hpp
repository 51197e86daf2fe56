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
// JSON experiment configuration and JSON result emission.

#ifndef FDSEC_CONFIG_IO_HPP
#define FDSEC_CONFIG_IO_HPP

#include "harness.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace fdsec
{

using json = nlohmann::ordered_json;

namespace detail
{

inline void reject_unknown_keys(const json &j, const std::set<std::string> &allowed, const std::string &where)
{
    require(j.is_object(), errc::config, where + " must be a JSON object");
    for (const auto &item : j.items())
        require(allowed.count(item.key()) == 1, errc::config, "unknown key '" + item.key() + "' in " + where);
}

template <class T> void read_if(const json &j, const char *key, T &out, const std::string &where)
{
    if (!j.contains(key))
        return;
    try
    {
        out = j.at(key).get<T>();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw error(errc::config, std::string("bad value for '") + key + "' in " + where + ": " + e.what());
    }
}

} // namespace detail

inline json to_json(const ExperimentConfig &c)
{
    json j;
    j["experiment"] = to_string(c.kind);
    j["seed"] = c.seed;
    j["trials"] = c.trials;
    j["threads"] = c.threads;
    j["system"] = {{"n_tx", c.n_tx},         {"power_db", c.power_db}, {"zeta", c.zeta},
                   {"sigma_a2", c.sigma_a2}, {"sigma_b2", c.sigma_b2}, {"sigma_e2", c.sigma_e2}};
    j["grid"] = {{"power_db", c.power_grid_db}, {"n_tx", c.antenna_grid}, {"zeta", c.zeta_grid}};
    j["adc"] = {{"tol", c.adc.tol}, {"max_iter", c.adc.max_iter}, {"stationarity_tol", c.adc.stationarity_tol}};
    j["robust"] = {{"epsilon", c.epsilon},
                   {"mean_scale", c.mean_scale},
                   {"rho", c.rho},
                   {"tau1", c.tau1},
                   {"tau2", c.tau2},
                   {"instances", c.instances},
                   {"draws_per_family", c.draws_per_family},
                   {"histogram_bins", c.histogram_bins}};
    return j;
}

/// Missing keys keep their defaults; unknown keys and ill-typed values are config errors.
inline ExperimentConfig config_from_json(const json &j)
{
    using detail::read_if;
    detail::reject_unknown_keys(j, {"experiment", "seed", "trials", "threads", "system", "grid", "adc", "robust"},
                                "config");
    ExperimentConfig c;
    if (j.contains("experiment"))
    {
        std::string kind;
        read_if(j, "experiment", kind, "config");
        c.kind = parse_experiment_kind(kind);
    }
    read_if(j, "seed", c.seed, "config");
    read_if(j, "trials", c.trials, "config");
    read_if(j, "threads", c.threads, "config");
    if (j.contains("system"))
    {
        const auto &s = j.at("system");
        detail::reject_unknown_keys(s, {"n_tx", "power_db", "zeta", "sigma_a2", "sigma_b2", "sigma_e2"}, "system");
        read_if(s, "n_tx", c.n_tx, "system");
        read_if(s, "power_db", c.power_db, "system");
        read_if(s, "zeta", c.zeta, "system");
        read_if(s, "sigma_a2", c.sigma_a2, "system");
        read_if(s, "sigma_b2", c.sigma_b2, "system");
        read_if(s, "sigma_e2", c.sigma_e2, "system");
    }
    if (j.contains("grid"))
    {
        const auto &g = j.at("grid");
        detail::reject_unknown_keys(g, {"power_db", "n_tx", "zeta"}, "grid");
        read_if(g, "power_db", c.power_grid_db, "grid");
        read_if(g, "n_tx", c.antenna_grid, "grid");
        read_if(g, "zeta", c.zeta_grid, "grid");
    }
    if (j.contains("adc"))
    {
        const auto &a = j.at("adc");
        detail::reject_unknown_keys(a, {"tol", "max_iter", "stationarity_tol"}, "adc");
        read_if(a, "tol", c.adc.tol, "adc");
        read_if(a, "max_iter", c.adc.max_iter, "adc");
        read_if(a, "stationarity_tol", c.adc.stationarity_tol, "adc");
    }
    if (j.contains("robust"))
    {
        const auto &r = j.at("robust");
        detail::reject_unknown_keys(r,
                                    {"epsilon", "mean_scale", "rho", "tau1", "tau2", "instances", "draws_per_family",
                                     "histogram_bins"},
                                    "robust");
        read_if(r, "epsilon", c.epsilon, "robust");
        read_if(r, "mean_scale", c.mean_scale, "robust");
        read_if(r, "rho", c.rho, "robust");
        read_if(r, "tau1", c.tau1, "robust");
        read_if(r, "tau2", c.tau2, "robust");
        read_if(r, "instances", c.instances, "robust");
        read_if(r, "draws_per_family", c.draws_per_family, "robust");
        read_if(r, "histogram_bins", c.histogram_bins, "robust");
    }
    c.validate();
    return c;
}

inline ExperimentConfig parse_config(const std::string &text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw error(errc::config, std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline ExperimentConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    require(in.good(), errc::config, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Template config at the nominal operating point (N = 4, P = 5 dB, zeta = 0.01, epsilon = 0.05).
inline std::string config_template(ExperimentKind kind = ExperimentKind::sweep_power)
{
    ExperimentConfig c;
    c.kind = kind;
    return to_json(c).dump(2) + "\n";
}

/// JSON mirror of the CSV: an array of records with the same field names.
inline json to_json(const ResultTable &t)
{
    json arr = json::array();
    for (const auto &r : t.records)
        arr.push_back({{"experiment", r.experiment},
                       {"method", r.method},
                       {"sweep", r.sweep},
                       {"trial", r.trial},
                       {"metric", r.metric},
                       {"value", r.value}});
    return arr;
}

inline void write_json(std::ostream &os, const ResultTable &t) { os << to_json(t).dump(1) << '\n'; }

} // namespace fdsec

#endif // FDSEC_CONFIG_IO_HPP
