#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ifs/errors.hpp"
#include "ifs/probes.hpp"

using nlohmann::json;
using namespace ifs;

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

json parse_value(const std::string& v) {
    try {
        return json::parse(v);
    } catch (const json::parse_error&) {
        return v;
    }
}

// First argument is a config file or a system spec; the rest are key=value.
RunConfig build_config(const std::vector<std::string>& args) {
    if (args.empty()) throw InputError("expected a config file or catalog:<name>");
    json base;
    const std::string& head = args[0];
    if (head.rfind("catalog:", 0) == 0) {
        base = {{"system", head}, {"probe", {{"name", ""}}}};
    } else {
        base = read_json_file(head);
        if (!base.is_object()) throw InputError("config must be a JSON object");
        if (base.contains("probe") && base["probe"].is_string()) base["probe"] = {{"name", base["probe"]}};
    }
    if (!base.contains("probe")) base["probe"] = {{"name", ""}};
    for (std::size_t i = 1; i < args.size(); ++i) {
        auto eq = args[i].find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("expected key=value, got '" + args[i] + "'");
        std::string key = args[i].substr(0, eq), val = args[i].substr(eq + 1);
        if (key == "probe") base["probe"]["name"] = val;
        else if (key == "expect") base["probe"]["expect"] = val;
        else if (key == "seed" || key == "rng_seed") base["rng_seed"] = parse_value(val);
        else if (key == "report") base["output"]["report"] = val;
        else if (key == "cloud_csv") base["output"]["cloud_csv"] = val;
        else base["probe"]["params"][key] = parse_value(val);
    }
    return RunConfig::from_json(base);
}

void write_timing(const std::string& report_path, double seconds) {
    write_file(report_path + ".timing.json", json{{"seconds", seconds}}.dump(2) + "\n");
}

int cmd_run(const std::vector<std::string>& args) {
    RunConfig cfg = build_config(args);
    auto t0 = std::chrono::steady_clock::now();
    RunResult r = execute(cfg);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string text = r.report.dump(2) + "\n";
    if (cfg.report_path) {
        write_file(*cfg.report_path, text);
        write_timing(*cfg.report_path, secs);
    } else {
        std::cout << text;
    }
    if (cfg.cloud_csv && r.outcome.cloud) write_file(*cfg.cloud_csv, cloud_csv(*r.outcome.cloud));
    std::cerr << cfg.probe << ": " << r.outcome.verdict;
    if (r.expected) std::cerr << " (expected " << *r.expected << ")";
    std::cerr << "\n";
    return r.exit_code;
}

// "1..20" expands to integers; otherwise a comma-separated list.
std::vector<json> parse_values(const std::string& s) {
    std::vector<json> out;
    auto dots = s.find("..");
    if (dots != std::string::npos) {
        int a = std::stoi(s.substr(0, dots)), b = std::stoi(s.substr(dots + 2));
        for (int i = a; i <= b; ++i) out.push_back(i);
        return out;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(parse_value(item));
    return out;
}

int cmd_sweep(const std::vector<std::string>& args, const std::string& param, const std::string& values, const std::string& csv_path) {
    RunConfig cfg = build_config(args);
    std::vector<json> vals = parse_values(values);
    SweepResult r = sweep(cfg, param, vals);
    if (!csv_path.empty()) write_file(csv_path, r.csv);
    else std::cout << r.csv;
    if (cfg.report_path) write_file(*cfg.report_path, r.report.dump(2) + "\n");
    return r.exit_code;
}

int cmd_verify(const std::string& path) {
    VerifyResult v = verify_report(read_json_file(path));
    if (v.ok) {
        std::cerr << "verify: " << v.kind << " certificate ok\n";
        return kExitExpected;
    }
    std::cerr << "verify: " << v.kind << " certificate FAILED";
    if (!v.message.empty()) std::cerr << ": " << v.message;
    std::cerr << "\n";
    for (int i : v.failures) std::cerr << "  failing witness index " << i << "\n";
    return kExitUnexpected;
}

int cmd_catalog_list() {
    for (const auto& name : catalog_names()) {
        NamedSystem ns = catalog_lookup(name);
        std::cout << name << (ns.stand_in ? " [stand-in]" : "") << "  k=" << ns.system.k() << "  " << ns.system.label
                  << "\n";
    }
    return kExitExpected;
}

int cmd_catalog_run(const std::string& name, std::uint64_t seed, bool dump) {
    if (dump) {
        std::cout << catalog_lookup(name).to_json().dump(2) << "\n";
        return kExitExpected;
    }
    bool all = true;
    for (const auto& line : catalog_run(name, seed)) {
        std::printf("%-4s %-18s expected %-26s got %-26s %.2fs\n", line.pass ? "ok" : "FAIL",
                    line.expectation.probe.c_str(), line.expectation.verdict.c_str(), line.verdict.c_str(),
                    line.seconds);
        all = all && line.pass;
    }
    return all ? kExitExpected : kExitUnexpected;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Circle IFS probes, certificates and skew-product leaves"};
    app.require_subcommand(1);

    std::vector<std::string> run_args;
    auto* run = app.add_subcommand("run", "Run one probe and emit a JSON report");
    run->add_option("args", run_args, "config.json or catalog:<name>, then key=value overrides")->required();

    std::vector<std::string> sweep_args;
    std::string sweep_param, sweep_values, sweep_csv;
    auto* sw = app.add_subcommand("sweep", "Run a probe over a list of parameter values, emit CSV");
    sw->add_option("args", sweep_args, "config.json or catalog:<name>, then key=value overrides")->required();
    sw->add_option("--param", sweep_param, "numeric parameter to vary")->required();
    sw->add_option("--values", sweep_values, "comma list or a..b")->required();
    sw->add_option("--csv", sweep_csv, "write the CSV here instead of stdout");

    std::string verify_path;
    auto* ver = app.add_subcommand("verify", "Replay the certificate stored in a report");
    ver->add_option("file", verify_path)->required();

    auto* cat = app.add_subcommand("catalog", "Named example systems");
    cat->require_subcommand(1);
    auto* cat_list = cat->add_subcommand("list", "List catalog systems");
    std::string cat_name;
    std::uint64_t cat_seed = 0;
    bool cat_dump = false;
    auto* cat_run = cat->add_subcommand("run", "Run every expectation of a catalog system");
    cat_run->add_option("name", cat_name)->required();
    cat_run->add_option("--seed", cat_seed);
    cat_run->add_flag("--json", cat_dump, "print the system's map specs and expectations instead");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (sw->parsed()) return cmd_sweep(sweep_args, sweep_param, sweep_values, sweep_csv);
        if (ver->parsed()) return cmd_verify(verify_path);
        if (cat_list->parsed()) return cmd_catalog_list();
        if (cat_run->parsed()) return cmd_catalog_run(cat_name, cat_seed, cat_dump);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const IllFormedMap& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NonInvertible& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::logic_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const BudgetExhausted& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const SearchExhausted& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnexpected;
    }
    return kExitInput;
}
