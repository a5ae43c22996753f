// Command-line front end: parse and check .fst files, execute networks with
// assumption/guarantee monitoring, re-monitor recorded traces, export DOT
// diagrams, and run the randomized property suites.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "focusst/dot_export.hpp"
#include "focusst/focusst.hpp"
#include "focusst/props.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAnalysis = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 64;

struct SystemArgs {
    std::string reference;
    std::string network_file;
    std::vector<std::string> spec_files;
};

void add_system_options(CLI::App* cmd, SystemArgs& args) {
    cmd->add_option("--ref", args.reference,
                    "reference system (steamboiler-rules or steamboiler-ifthenelse)");
    cmd->add_option("--network", args.network_file, "network .fst file");
    cmd->add_option("--spec", args.spec_files, "component .fst files (repeatable)");
}

std::string read_file_or_throw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw focusst::IoError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct LoadedSystem {
    focusst::Network network;
    focusst::SpecRegistry registry;
};

// Builds the network either from a shipped reference or from user files.
LoadedSystem load_system(const SystemArgs& args) {
    if (!args.reference.empty()) {
        auto loaded = focusst::load_reference(args.reference);
        return {std::move(loaded.network), std::move(loaded.registry)};
    }
    if (args.network_file.empty())
        throw focusst::ConfigError("either --ref or --network is required");
    LoadedSystem sys;
    std::optional<focusst::Network> network;
    auto take = [&](const std::string& path) {
        auto result = focusst::parse_file(read_file_or_throw(path), path, sys.registry);
        for (const auto& d : result.diagnostics)
            std::cerr << d.to_string() << "\n";
        if (!result.ok())
            throw focusst::ConfigError("'" + path + "' does not validate");
        if (!result.file.networks.empty() && !network)
            network = std::move(result.file.networks.front());
    };
    for (const auto& path : args.spec_files)
        take(path);
    take(args.network_file);
    if (!network)
        throw focusst::ConfigError("no network declared in '" + args.network_file + "'");
    sys.network = std::move(*network);
    return sys;
}

void print_verdicts(const std::vector<focusst::MonitorVerdict>& verdicts) {
    size_t width = 12;
    for (const auto& v : verdicts)
        width = std::max(width, v.label.size());
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << "label"
              << std::setw(22) << "status" << "detail\n";
    for (const auto& v : verdicts) {
        std::string status = to_string(v.status);
        if (v.first_violation_step)
            status += " @" + std::to_string(*v.first_violation_step);
        std::cout << std::left << std::setw(static_cast<int>(width) + 2) << v.label << std::setw(22)
                  << status << v.detail << "\n";
    }
    size_t violated = 0, warnings = 0;
    for (const auto& v : verdicts) {
        violated += v.status == focusst::VerdictStatus::Violated;
        warnings += v.status == focusst::VerdictStatus::Warning;
    }
    std::cout << verdicts.size() << " verdicts, " << violated << " violated, " << warnings
              << " warnings\n";
}

int cmd_check(const std::vector<std::string>& paths) {
    focusst::SpecRegistry registry;
    bool failed = false;
    for (const auto& path : paths) {
        std::string text;
        try {
            text = read_file_or_throw(path);
        } catch (const focusst::IoError& e) {
            std::cerr << e.what() << "\n";
            return kExitIo;
        }
        auto result = focusst::parse_file(text, path, registry);
        for (const auto& d : result.diagnostics)
            std::cerr << d.to_string() << "\n";
        failed |= !result.ok();
    }
    return failed ? kExitAnalysis : kExitOk;
}

int cmd_run(const SystemArgs& args, focusst::Nat horizon, focusst::Nat seed,
            const std::string& trace_out, bool quiet) {
    LoadedSystem sys = load_system(args);
    focusst::NetworkIndex index(sys.network);
    focusst::Trace trace = focusst::run(index, horizon, seed);
    std::string text = focusst::trace_to_string(trace);
    if (!trace_out.empty()) {
        std::ofstream out(trace_out, std::ios::binary);
        if (!out)
            throw focusst::IoError("cannot write '" + trace_out + "'");
        out << text;
    }
    if (!quiet)
        print_verdicts(trace.verdicts);
    return focusst::any_violated(trace.verdicts) ? kExitAnalysis : kExitOk;
}

int cmd_monitor(const SystemArgs& args, const std::string& trace_path) {
    LoadedSystem sys = load_system(args);
    focusst::NetworkIndex index(sys.network);
    focusst::Json doc;
    try {
        doc = focusst::Json::parse(read_file_or_throw(trace_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw focusst::ConfigError("'" + trace_path + "' is not valid JSON: " + e.what());
    }
    focusst::Trace trace = focusst::trace_from_json(doc, index);
    if (trace.horizon == 0)
        throw focusst::ConfigError("trace horizon is 0; nothing to monitor");
    auto verdicts = focusst::monitor(trace, index);
    print_verdicts(verdicts);
    return focusst::any_violated(verdicts) ? kExitAnalysis : kExitOk;
}

int cmd_export_dot(const SystemArgs& args, const std::string& out_path) {
    LoadedSystem sys = load_system(args);
    std::string dot = focusst::export_dot(sys.network);
    if (out_path.empty()) {
        std::cout << dot;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out)
            throw focusst::IoError("cannot write '" + out_path + "'");
        out << dot;
    }
    return kExitOk;
}

int cmd_props(focusst::Nat trials, focusst::Nat seed, bool inject_failure) {
    focusst::PropOptions opts{trials, seed, inject_failure};
    auto reports = focusst::run_properties(opts);
    for (const auto& r : reports) {
        std::cout << (r.passed() ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.trials << " trials";
        if (!r.passed())
            std::cout << ", " << r.failures << " failures";
        std::cout << ")\n";
        if (!r.passed() && !r.counterexample.empty())
            std::cout << "       counterexample: " << r.counterexample << "\n";
    }
    return all_passed(reports) ? kExitOk : kExitAnalysis;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FOCUS-ST specification toolkit: check, simulate, monitor, export"};
    app.require_subcommand(1);

    auto* check = app.add_subcommand("check", "parse and validate .fst files");
    std::vector<std::string> check_paths;
    check->add_option("files", check_paths, "files to check")->required();

    auto* run_cmd = app.add_subcommand("run", "execute a network and monitor the trace");
    SystemArgs run_args;
    add_system_options(run_cmd, run_args);
    focusst::Nat horizon = 1000;
    focusst::Nat run_seed = 0;
    std::string trace_out = "trace.json";
    bool quiet = false;
    run_cmd->add_option("--horizon", horizon, "number of time intervals (default 1000)");
    run_cmd->add_option("--seed", run_seed, "seed for all choose draws (default 0)");
    run_cmd->add_option("--trace-out", trace_out, "trace file to write (default trace.json)");
    run_cmd->add_flag("--quiet", quiet, "suppress the verdict table");

    auto* monitor_cmd = app.add_subcommand("monitor", "re-check a recorded trace against a network");
    SystemArgs monitor_args;
    add_system_options(monitor_cmd, monitor_args);
    std::string trace_path;
    monitor_cmd->add_option("--trace", trace_path, "trace file to check")->required();

    auto* export_cmd = app.add_subcommand("export-dot", "emit the architecture diagram in DOT form");
    SystemArgs export_args;
    add_system_options(export_cmd, export_args);
    std::string dot_out;
    export_cmd->add_option("-o,--out", dot_out, "output file (default: stdout)");

    auto* props_cmd = app.add_subcommand("props", "run the randomized property suites");
    focusst::Nat trials = 1000;
    focusst::Nat props_seed = 0;
    bool inject_failure = false;
    props_cmd->add_option("--trials", trials, "trials per property (default 1000)");
    props_cmd->add_option("--seed", props_seed, "seed (default 0)");
    props_cmd->add_flag("--inject-failure", inject_failure, "harness self-test: add a false property")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (check->parsed())
            return cmd_check(check_paths);
        if (run_cmd->parsed()) {
            if (horizon == 0) {
                std::cerr << "usage error: --horizon must be >= 1\n";
                return kExitUsage;
            }
            return cmd_run(run_args, horizon, run_seed, trace_out, quiet);
        }
        if (monitor_cmd->parsed())
            return cmd_monitor(monitor_args, trace_path);
        if (export_cmd->parsed())
            return cmd_export_dot(export_args, dot_out);
        if (props_cmd->parsed()) {
            if (trials == 0) {
                std::cerr << "usage error: --trials must be >= 1\n";
                return kExitUsage;
            }
            return cmd_props(trials, props_seed, inject_failure);
        }
    } catch (const focusst::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const focusst::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAnalysis;
    }
    return kExitUsage;
}
