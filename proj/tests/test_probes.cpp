#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ifs/errors.hpp"
#include "ifs/probes.hpp"

using namespace ifs;
using nlohmann::json;

namespace {

RunConfig config(const std::string& system, const std::string& probe, json params = json::object()) {
    return RunConfig::from_json({{"system", system}, {"probe", {{"name", probe}, {"params", params}}}});
}

std::vector<std::string> csv_lines(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t e = csv.find("\r\n", pos);
        REQUIRE(e != std::string::npos);
        out.push_back(csv.substr(pos, e - pos));
        pos = e + 2;
    }
    return out;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(config("catalog:two-rotations", "no-such-probe"), InputError);
    try {
        config("catalog:two-rotations", "strict-attractor", {{"epsilon", 0.001}, {"delta", 0.001}});
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("epsilon must exceed 2*delta") != std::string::npos);
    }
    CHECK_THROWS_AS(config("catalog:two-rotations", "strict-attractor", {{"budget", 0}}), InputError);
    CHECK_THROWS_AS(config("catalog:two-rotations", "minimality", {{"grid", -3}}), InputError);
    CHECK_THROWS_AS(RunConfig::from_json({{"probe", "orbit"}}), InputError);
    CHECK_THROWS_AS(execute(config("catalog:missing", "orbit")), InputError);

    RunConfig c = config("catalog:fig2-pair", "orbit", {{"depth", 3}});
    CHECK(RunConfig::from_json(c.to_json()).to_json() == c.to_json());
    CHECK(probe_names().size() == 18);
}

TEST_CASE("two-rotation unstable leaf run") {
    RunResult r = execute(config("catalog:two-rotations", "unstable-leaf", {{"depth", 20}}));
    CHECK(r.exit_code == kExitExpected);
    CHECK(r.outcome.verdict == "NotDense");
    CHECK(r.report["result"]["projection_size"] == 2);
    CHECK(r.report["config"]["probe"]["params"]["depth"] == 20);
    REQUIRE(r.outcome.cloud);
    CHECK(r.outcome.cloud->size() == 2);
}

TEST_CASE("exit codes follow the expectation") {
    RunConfig c = config("catalog:two-rotations", "unstable-leaf", {{"depth", 5}});
    c.expect = "Dense";
    CHECK(execute(c).exit_code == kExitUnexpected);

    // too small a depth exhausts the search before any ball is reached
    RunConfig m = config("catalog:rotation-morse-smale", "minimality", {{"depth", 1}, {"grid", 4}});
    RunResult r = execute(m);
    CHECK(r.outcome.verdict == "Incomplete");
    CHECK(r.exit_code == kExitBudget);
}

TEST_CASE("reports are deterministic") {
    RunConfig c = config("catalog:rotation-morse-smale", "expanding-cover");
    c.params["perturb"] = 1e-3;
    c.rng_seed = 99;
    CHECK(execute(c).report.dump() == execute(c).report.dump());
    RunConfig d = config("catalog:fig2-pair", "target-word", {{"random_targets", 4}});
    d.rng_seed = 5;
    CHECK(execute(d).report.dump() == execute(d).report.dump());
}

TEST_CASE("verify replays stored certificates") {
    SUBCASE("density certificate") {
        RunResult r = execute(config("catalog:rotation-morse-smale", "minimality", {{"epsilon", 0.05}, {"grid", 8}}));
        REQUIRE(r.exit_code == kExitExpected);
        json rep = json::parse(r.report.dump());
        CHECK(verify_report(rep).ok);
        rep["certificate"]["witnesses"][5]["point"] = rep["certificate"]["witnesses"][5]["point"].get<double>() + 0.2;
        VerifyResult v = verify_report(rep);
        CHECK_FALSE(v.ok);
        REQUIRE(v.failures.size() == 1);
        CHECK(v.failures[0] == 5);
    }
    SUBCASE("blending certificate") {
        RunResult r = execute(config("catalog:fig2-pair", "blending"));
        CHECK(verify_report(r.report).ok);
    }
    SUBCASE("expanding cover") {
        RunResult r = execute(config("catalog:rotation-morse-smale", "expanding-cover"));
        CHECK(verify_report(r.report).ok);
    }
    SUBCASE("leaf") {
        RunResult r = execute(config("catalog:two-rotations", "unstable-leaf", {{"depth", 6}}));
        json rep = r.report;
        CHECK(verify_report(rep).ok);
        rep["certificate"]["witnesses"][1]["point"] = 0.123;
        VerifyResult v = verify_report(rep);
        CHECK_FALSE(v.ok);
        CHECK(v.failures == std::vector<int>{1});
    }
    SUBCASE("perturbed systems are rebuilt from the seed") {
        RunConfig c = config("catalog:fig2-pair", "blending", {{"perturb", 1e-3}, {"D", {1.0 / 3 - 1.0 / 320, 1.0 / 3 + 1.0 / 160}}});
        c.rng_seed = 12;
        RunResult r = execute(c);
        CHECK(r.outcome.verdict == "Blending");
        CHECK(verify_report(r.report).ok);
    }
}

TEST_CASE("sweep over iteration depth") {
    SweepResult s = sweep(config("catalog:cantor-branches", "iterate"), "depth",
                          {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20});
    auto lines = csv_lines(s.csv);
    REQUIRE(lines.size() == 21);
    CHECK(lines[0] == "value,verdict,last_distance");
    std::vector<double> d;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::stringstream ss(lines[i]);
        std::string v, verdict, metric;
        std::getline(ss, v, ',');
        std::getline(ss, verdict, ',');
        std::getline(ss, metric, ',');
        CHECK(std::stoi(v) == int(i));
        d.push_back(std::stod(metric));
    }
    // geometric decay by 1/3 until the net resolution is reached
    for (int n = 1; n <= 5; ++n) CHECK(d[std::size_t(n)] / d[std::size_t(n - 1)] == doctest::Approx(1.0 / 3).epsilon(0.02));
    for (int n = 1; n <= 20; ++n) CHECK(d[std::size_t(n - 1)] <= std::pow(3.0, -n) * 0.25 + 2.0 / 4096);
    CHECK_THROWS_AS(sweep(config("catalog:cantor-branches", "iterate"), "depth", {}), InputError);
}

TEST_CASE("sweep writes 17 significant digits") {
    SweepResult s = sweep(config("catalog:fig2-pair", "blending"), "grid", {256, 1024});
    auto lines = csv_lines(s.csv);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "value,verdict,contraction_beta");
    CHECK(lines[1].rfind("256,Blending,0.66666666666666", 0) == 0);
}

TEST_CASE("bootstrap certificates over several epsilons replay") {
    for (double eps : {0.1, 0.05, 0.02}) {
        RunResult r = execute(config("catalog:rotation-morse-smale", "bootstrap", {{"epsilon", eps}}));
        CHECK(r.outcome.verdict == "Complete");
        CHECK(r.outcome.metric == doctest::Approx(eps * std::pow(1.2, -5)).epsilon(0.01));
        CHECK(verify_report(r.report).ok);
    }
}

TEST_CASE("catalog expectations replay") {
    for (const char* name : {"single-rotation", "fig2-pair", "cantor-branches", "cantor-group"}) {
        for (const auto& line : catalog_run(name)) {
            INFO(name << " " << line.expectation.probe);
            CHECK(line.verdict == line.expectation.verdict);
        }
    }
}
