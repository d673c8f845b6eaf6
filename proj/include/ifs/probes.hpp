#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifs/catalog.hpp"
#include "ifs/hyperspace.hpp"

namespace ifs {

enum ExitCode { kExitExpected = 0, kExitUnexpected = 1, kExitBudget = 2, kExitInput = 3 };

struct RunConfig {
    nlohmann::json system;  // "catalog:<name>" or {"maps": [...], "label": ...}
    std::string probe;
    nlohmann::json params = nlohmann::json::object();
    std::optional<std::string> expect;
    std::optional<std::string> report_path;
    std::optional<std::string> cloud_csv;
    std::uint64_t rng_seed = 0;

    nlohmann::json to_json() const;
    // Parses and validates; throws InputError naming the violated constraint.
    static RunConfig from_json(const nlohmann::json& j);
    void validate() const;
};

struct ResolvedSystem {
    IfsSystem system;
    std::optional<NamedSystem> named;
};

ResolvedSystem resolve_system(const nlohmann::json& spec);

struct ProbeOutcome {
    std::string verdict;
    bool budget = false;  // the verdict records an exhausted search
    std::string metric_name;
    double metric = 0.0;
    nlohmann::json report = nlohmann::json::object();
    std::optional<PointCloud> cloud;
    std::optional<nlohmann::json> certificate;
};

std::vector<std::string> probe_names();
void validate_probe_params(const std::string& probe, const nlohmann::json& params);

// Runs one probe on F (after the optional "perturb" parameter is applied).
ProbeOutcome run_probe(const IfsSystem& F, const std::string& probe, const nlohmann::json& params,
                       std::uint64_t rng_seed);

struct RunResult {
    int exit_code = kExitExpected;
    std::optional<std::string> expected;
    ProbeOutcome outcome;
    nlohmann::json report;  // deterministic; embeds the config
};

// Fills params from a matching catalog expectation, runs, and classifies.
RunResult execute(const RunConfig& cfg);

struct SweepResult {
    int exit_code = kExitExpected;
    std::string csv;
    nlohmann::json report;
};

SweepResult sweep(const RunConfig& cfg, const std::string& parameter, const std::vector<nlohmann::json>& values);

struct VerifyResult {
    bool ok = false;
    std::string kind;
    std::vector<int> failures;
    std::string message;
};

// Replays the certificate stored in a run report.
VerifyResult verify_report(const nlohmann::json& report);

struct CatalogRunLine {
    Expectation expectation;
    std::string verdict;
    bool pass = false;
    double seconds = 0.0;
};

std::vector<CatalogRunLine> catalog_run(const std::string& name, std::uint64_t rng_seed = 0);

}  // namespace ifs
