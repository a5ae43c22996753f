#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "focusst/parser.hpp"
#include "focusst/runtime.hpp"

namespace focusst {

// A shipped reference system: its sources, the network to build, the
// verdicts a canonical long run must produce, and the numeric facts the
// acceptance checks pin down.
struct ReferenceCase {
    std::string name;
    std::vector<std::string> sources;  // resolved file paths
    std::string network_file;
    std::string network_name;
    std::map<std::string, VerdictStatus> expected_verdicts;
    std::map<std::string, Nat> bounded_facts;
};

struct LoadedReference {
    Network network;
    ReferenceCase reference;
    SpecRegistry registry;
};

namespace detail {

inline std::vector<std::string> spec_search_path() {
    std::vector<std::string> dirs;
    if (const char* env = std::getenv("FOCUS_ST_SPEC_PATH"))
        if (*env)
            dirs.push_back(env);
    dirs.push_back("specs");
#ifdef FOCUSST_DEFAULT_SPECS_DIR
    dirs.push_back(FOCUSST_DEFAULT_SPECS_DIR);
#endif
    return dirs;
}

inline std::string resolve_spec_file(const std::string& name) {
    namespace fs = std::filesystem;
    for (const auto& dir : spec_search_path()) {
        fs::path candidate = fs::path(dir) / name;
        if (fs::exists(candidate))
            return candidate.string();
    }
    throw IoError("cannot find spec file '" + name +
                  "' (searched FOCUS_ST_SPEC_PATH and ./specs)");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace detail

// Loads and validates one of the shipped reference systems:
//   steamboiler-rules       controller as four guarded rules
//   steamboiler-ifthenelse  controller as one nested if-then-else formula
inline LoadedReference load_reference(const std::string& name) {
    ReferenceCase ref;
    ref.name = name;
    std::vector<std::string> files;
    if (name == "steamboiler-rules")
        files = {"types.fst", "steamboiler.fst", "converter.fst", "controller_rules.fst",
                 "systemreq.fst", "control_system_arch.fst"};
    else if (name == "steamboiler-ifthenelse")
        files = {"types.fst", "steamboiler.fst", "converter.fst", "controller_ifthenelse.fst",
                 "systemreq.fst", "control_system_arch.fst"};
    else
        throw UnknownReferenceError("unknown reference '" + name +
                                    "' (try steamboiler-rules or steamboiler-ifthenelse)");

    LoadedReference loaded;
    std::optional<Network> network;
    for (const auto& file : files) {
        std::string path = detail::resolve_spec_file(file);
        ref.sources.push_back(path);
        auto result = parse_file(detail::read_file(path), path, loaded.registry);
        if (!result.ok()) {
            std::string what = "reference spec '" + path + "' does not validate:";
            for (const auto& d : result.diagnostics)
                what += "\n  " + d.to_string();
            throw ConfigError(what);
        }
        if (!result.file.networks.empty()) {
            network = std::move(result.file.networks.front());
            ref.network_file = path;
        }
    }
    if (!network)
        throw ConfigError("reference '" + name + "' declares no network");
    ref.network_name = network->name;

    // verdicts of the canonical closed-loop run (any horizon >= ~100, any seed)
    ref.expected_verdicts = {
        {"SteamBoiler.A1", VerdictStatus::Satisfied}, {"SteamBoiler.I1", VerdictStatus::Satisfied},
        {"SteamBoiler.I2", VerdictStatus::Satisfied}, {"SteamBoiler.B1", VerdictStatus::Satisfied},
        {"SteamBoiler.B2", VerdictStatus::Satisfied}, {"Controller.A1", VerdictStatus::Satisfied},
        {"Converter.A1", VerdictStatus::Satisfied},   {"Converter.B1", VerdictStatus::Satisfied},
        {"Converter.B2", VerdictStatus::Satisfied},   {"Converter.B3", VerdictStatus::Satisfied},
        {"SystemReq.A1", VerdictStatus::Satisfied},   {"SystemReq.B1", VerdictStatus::Satisfied},
        {"SystemReq.B2", VerdictStatus::Satisfied},
    };
    if (name == "steamboiler-rules") {
        ref.expected_verdicts["Controller.B1"] = VerdictStatus::Satisfied;
        ref.expected_verdicts["Controller.B2"] = VerdictStatus::Satisfied;
        ref.expected_verdicts["Controller.B3"] = VerdictStatus::Satisfied;
        ref.expected_verdicts["Controller.B4"] = VerdictStatus::Satisfied;
    } else {
        ref.expected_verdicts["Controller.B1"] = VerdictStatus::Satisfied;
    }

    ref.bounded_facts = {
        {"initial_level", 500},    {"pump_on_threshold", 300}, {"pump_off_threshold", 700},
        {"required_min", 200},     {"required_max", 800},      {"envelope_min", 281},
        {"envelope_max", 719},     {"max_flow", 10},
    };

    for (const auto& [label, status] : ref.expected_verdicts) {
        (void)status;
        auto dot = label.find('.');
        std::string owner = label.substr(0, dot);
        std::string item = label.substr(dot + 1);
        bool found = false;
        const ComponentSpec* owner_spec = nullptr;
        if (const auto* inst = network->find_instance(owner))
            owner_spec = &inst->spec;
        for (const auto& mon : network->monitors)
            if (mon.name == owner)
                owner_spec = &mon.spec;
        if (owner_spec) {
            for (const auto& a : owner_spec->assumptions)
                found |= a.label == item;
            for (const auto& g : owner_spec->guarantees)
                found |= g.label() == item;
        }
        if (!found)
            throw ConfigError("expected verdict label '" + label + "' does not exist in the network");
    }

    loaded.network = std::move(*network);
    loaded.reference = std::move(ref);
    return loaded;
}

}  // namespace focusst
