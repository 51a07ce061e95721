#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "cli/manifest.hpp"
#include "cli/run.hpp"

using namespace ptn;
using nlohmann::json;

namespace {

int run_cli(std::vector<std::string> args) {
    std::vector<char*> argv;
    args.insert(args.begin(), "ptn");
    for (auto& a : args) argv.push_back(a.data());
    return dispatch(int(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void spit(const std::filesystem::path& p, const std::string& s) {
    std::ofstream os(p, std::ios::binary);
    os << s;
}

} // namespace

TEST_CASE("validate_config fills defaults and is idempotent") {
    json doc{{"K", 8}, {"dt", 1e-3}, {"T", 0.1}, {"d", 2}, {"N", 4}};
    auto r = validate_config(doc);
    REQUIRE(r.ok());
    CHECK(r.normalized["gamma"] == 0.0);
    CHECK(r.normalized["shell"] == "ball");
    CHECK(r.normalized["scheme"] == "ito_etd");
    CHECK(r.normalized["record_every"] == 10);
    auto r2 = validate_config(r.normalized);
    REQUIRE(r2.ok());
    CHECK(r2.normalized == r.normalized);
}

TEST_CASE("validate_config aggregates all violations") {
    json doc{{"K", 8},        {"dt", -1.0},         {"T", 0.1},
             {"d", 5},        {"N", 12},            {"scheme", "leapfrog"},
             {"gamma", 99.0}, {"N_list", {4, 4, 2}}};
    auto r = validate_config(doc);
    CHECK(!r.ok());
    CHECK(r.errors.size() >= 5);
    CHECK(r.normalized.is_null());

    json missing{{"d", 2}};
    auto rm = validate_config(missing);
    CHECK(!rm.ok());
    CHECK(rm.errors.size() >= 3);  // K, dt, T all missing
}

TEST_CASE("validate_config warns on the a > 1/2 explicit-Euler regime") {
    json doc{{"K", 8}, {"dt", 1e-3}, {"T", 0.1}, {"a", 0.75}, {"mode", "euler"}};
    auto r = validate_config(doc);
    REQUIRE(r.ok());
    CHECK(!r.warnings.empty());
}

TEST_CASE("config digest is stable under key reordering") {
    json a{{"K", 8}, {"dt", 1e-3}, {"nu", 0.5}};
    json b{{"nu", 0.5}, {"K", 8}, {"dt", 1e-3}};
    CHECK(config_digest(a) == config_digest(b));
    json c = a;
    c["nu"] = 0.6;
    CHECK(config_digest(a) != config_digest(c));
}

TEST_CASE("manifest carries digest, seed, version, outputs") {
    json cfg{{"K", 4}, {"dt", 1e-3}, {"T", 0.1}};
    auto m = make_manifest(cfg, 42, {"report.json", "x.csv"});
    CHECK(m.contains("config_digest"));
    CHECK(m["seed"] == 42);
    CHECK(m.contains("version"));
    CHECK(m["outputs"].size() == 2);
}

TEST_CASE("dispatch exit codes and output determinism") {
    namespace fs = std::filesystem;
    fs::path tmp = fs::temp_directory_path() / "ptn_cli_test";
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    CHECK(run_cli({"no-such-command"}) == 2);
    CHECK(run_cli({"corrector-check", "--config", (tmp / "missing.json").string(),
                   "--out", (tmp / "o0").string()}) == 2);

    json cfg;
    cfg["scalar"] = {{"d", 2}, {"a_list", {0.25}}, {"N_list", {4, 16}},
                     {"xi_list", {{1, 0}}}};
    spit(tmp / "corr.json", cfg.dump());

    int rc1 = run_cli({"corrector-check", "--config", (tmp / "corr.json").string(),
                       "--out", (tmp / "o1").string(), "--quiet"});
    CHECK(rc1 == 0);
    int rc2 = run_cli({"corrector-check", "--config", (tmp / "corr.json").string(),
                       "--out", (tmp / "o2").string(), "--quiet"});
    CHECK(rc2 == 0);

    CHECK(slurp(tmp / "o1" / "report.json") == slurp(tmp / "o2" / "report.json"));
    CHECK(slurp(tmp / "o1" / "corrector_gaps.csv") == slurp(tmp / "o2" / "corrector_gaps.csv"));
    CHECK(fs::exists(tmp / "o1" / "manifest.json"));
    auto man = json::parse(slurp(tmp / "o1" / "manifest.json"));
    CHECK(man.contains("config_digest"));

    // bad config -> exit 2
    spit(tmp / "bad.json", "{ not json");
    CHECK(run_cli({"simulate-scalar", "--config", (tmp / "bad.json").string(),
                   "--out", (tmp / "o3").string()}) == 2);
    json invalid{{"K", 8}, {"dt", -1.0}, {"T", 0.1}};
    spit(tmp / "invalid.json", invalid.dump());
    CHECK(run_cli({"simulate-scalar", "--config", (tmp / "invalid.json").string(),
                   "--out", (tmp / "o4").string()}) == 2);

    // a tiny simulation run exits 0 and is reproducible
    json sim{{"d", 2},  {"K", 6},      {"N", 3},      {"dt", 1e-3},
             {"T", 0.01}, {"nu", 0.1},  {"a", 0.0},    {"b", 0.0},
             {"init", {{"type", "stationary"}}}};
    spit(tmp / "sim.json", sim.dump());
    int s1 = run_cli({"simulate-scalar", "--config", (tmp / "sim.json").string(),
                      "--out", (tmp / "s1").string(), "--seed", "7", "--quiet"});
    CHECK(s1 == 0);
    int s2 = run_cli({"simulate-scalar", "--config", (tmp / "sim.json").string(),
                      "--out", (tmp / "s2").string(), "--seed", "7", "--quiet"});
    CHECK(s2 == 0);
    CHECK(slurp(tmp / "s1" / "trajectory.csv") == slurp(tmp / "s2" / "trajectory.csv"));
    CHECK(slurp(tmp / "s1" / "final_state.json") == slurp(tmp / "s2" / "final_state.json"));

    fs::remove_all(tmp);
}
