// SPDX-License-Identifier: Apache-2.0

#include <catch_amalgamated.hpp>
#include <fdsec/cli.hpp>

#include <filesystem>
#include <sstream>

using namespace fdsec;

namespace
{

struct CliRun
{
    int code;
    std::string out, err;
};

CliRun run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "fdsec_cli");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

errc config_error_code(const std::string &text)
{
    try
    {
        parse_config(text);
    }
    catch (const error &e)
    {
        return e.code();
    }
    return errc::internal_consistency;
}

} // namespace

TEST_CASE("Config JSON round trip", "[io]")
{
    ExperimentConfig c;
    c.kind = ExperimentKind::robust_uncertain_moment;
    c.seed = 123456789012345ULL;
    c.trials = 7;
    c.n_tx = 6;
    c.power_db = 12.5;
    c.power_grid_db = {1, 2};
    c.antenna_grid = {2, 9};
    c.zeta_grid = {0.2};
    c.adc.tol = 1e-7;
    c.tau1 = 0.01;
    c.tau2 = 0.02;
    c.draws_per_family = 77;
    const auto back = config_from_json(to_json(c));
    CHECK(back.kind == c.kind);
    CHECK(back.seed == c.seed);
    CHECK(back.trials == 7);
    CHECK(back.n_tx == 6);
    CHECK(back.power_db == 12.5);
    CHECK(back.power_grid_db == c.power_grid_db);
    CHECK(back.antenna_grid == c.antenna_grid);
    CHECK(back.zeta_grid == c.zeta_grid);
    CHECK(back.adc.tol == 1e-7);
    CHECK(back.tau1 == 0.01);
    CHECK(back.tau2 == 0.02);
    CHECK(back.draws_per_family == 77);
    CHECK(to_json(back).dump() == to_json(c).dump());
}

TEST_CASE("Partial configs keep defaults", "[io]")
{
    const auto c = parse_config(R"({"experiment": "convergence", "system": {"n_tx": 8}})");
    CHECK(c.kind == ExperimentKind::convergence);
    CHECK(c.n_tx == 8);
    CHECK(c.power_db == 5.0);
    CHECK(c.trials == 200);
    CHECK(c.draws_per_family == 100000);
}

TEST_CASE("Malformed configs are config errors", "[io]")
{
    CHECK(config_error_code("{ not json") == errc::config);
    CHECK(config_error_code(R"({"trails": 3})") == errc::config);
    CHECK(config_error_code(R"({"system": {"zeta_typo": 0.1}})") == errc::config);
    CHECK(config_error_code(R"({"trials": "many"})") == errc::config);
    CHECK(config_error_code(R"({"experiment": "sweep_bandwidth"})") == errc::config);
    CHECK(config_error_code(R"({"grid": {"power_db": []}})") == errc::config);
    CHECK(config_error_code(R"({"system": []})") == errc::config);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), error);
}

TEST_CASE("Template matches the nominal operating point", "[io]")
{
    const auto c = parse_config(config_template());
    CHECK(c.n_tx == 4);
    CHECK(c.power_db == 5.0);
    CHECK(c.zeta == 0.01);
    CHECK(c.epsilon == 0.05);
    CHECK(c.rho == 0.002);
}

TEST_CASE("Committed example config parses", "[io]")
{
    const auto path = std::filesystem::path(FDSEC_SOURCE_DIR) / "configs" / "default.json";
    const auto c = load_config(path.string());
    CHECK(to_json(c).dump() == to_json(ExperimentConfig{}).dump());
}

TEST_CASE("JSON output mirrors the CSV records", "[io]")
{
    ResultTable t;
    t.add("e", "m", "5", 2, "ssr", 1.25);
    t.add("e", "m", "10", 3, "r_e", 0.0);
    const auto j = to_json(t);
    REQUIRE(j.size() == 2);
    CHECK(j[0]["experiment"] == "e");
    CHECK(j[0]["sweep"] == "5");
    CHECK(j[0]["trial"] == 2);
    CHECK(j[0]["metric"] == "ssr");
    CHECK(j[0]["value"] == 1.25);
    std::ostringstream os;
    t.write_csv(os);
    CHECK(os.str() == "experiment,method,sweep,trial,metric,value\ne,m,5,2,ssr,1.25\ne,m,10,3,r_e,0\n");
}

TEST_CASE("CLI exit codes", "[io][cli]")
{
    CHECK(exit_code(errc::infeasible) == exit_infeasible);
    CHECK(exit_code(errc::config) == exit_usage);
    CHECK(exit_code(errc::internal_consistency) == exit_internal);

    CHECK(run_cli({"--help"}).code == 0);
    const auto unknown = run_cli({"solve", "--bogus"});
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("--bogus") != std::string::npos);
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    const auto missing = run_cli({"solve", "--config", "/nonexistent/config.json"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("config.json") != std::string::npos);
    CHECK(run_cli({"solve", "--format", "xml"}).code == 2);
    CHECK(run_cli({"solve", "--trials", "0"}).code == 2);
}

TEST_CASE("CLI subcommands produce deterministic output", "[io][cli]")
{
    const auto gen = run_cli({"gen-config"});
    REQUIRE(gen.code == 0);
    CHECK(parse_config(gen.out).n_tx == 4);

    const auto a = run_cli({"solve", "--seed", "42"});
    const auto b = run_cli({"solve", "--seed", "42"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("experiment,method,sweep,trial,metric,value\n", 0) == 0);
    CHECK(a.out.find("solve,fd_dc,all,0,ssr,") != std::string::npos);
    CHECK(run_cli({"solve", "--seed", "43"}).out != a.out);

    const auto js = run_cli({"solve", "--seed", "42", "--format", "json"});
    REQUIRE(js.code == 0);
    CHECK(json::parse(js.out).is_array());

    const auto rs = run_cli({"robust-solve", "--seed", "5"});
    REQUIRE(rs.code == 0);
    CHECK(rs.out.find("robust_solve,robust,all,0,audit_pass,1") != std::string::npos);
}

TEST_CASE("CLI writes files into the output directory", "[io][cli]")
{
    const auto dir = std::filesystem::temp_directory_path() / "fdsec_test_io_out";
    std::filesystem::remove_all(dir);
    const auto cfg = dir / "cfg";
    REQUIRE(run_cli({"gen-config", "--out", cfg.string()}).code == 0);
    REQUIRE(std::filesystem::exists(cfg / "config.json"));
    REQUIRE(run_cli({"convergence", "--config", (cfg / "config.json").string(), "--trials", "2", "--out",
                     dir.string()})
                .code == 0);
    CHECK(std::filesystem::exists(dir / "convergence.csv"));
    std::filesystem::remove_all(dir);
}
