#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace qhlab {

// One batch invocation: `qhlab <command> [--config FILE] [--key value ...]
// --out DIR`. Values given as flags override values from the config file
// (plain `key = value` lines, '#' comments). Typed validation of keys
// against the command's schema happens at dispatch, so a bad value is still
// recorded in the run's manifest before being rejected.
struct RunConfig {
    std::string command;
    std::map<std::string, std::string> parameters;  // raw text, schema-checked at dispatch
    std::filesystem::path output_dir = "qhlab_out";
};

// Parses argv (minus the program name). Throws UsageError on an unknown
// command, malformed flag pairing, or an unreadable config file.
RunConfig parse_config(const std::vector<std::string>& args);

// Dispatches one run: writes manifest.txt (status = running) before any
// compute, then the command's CSV/SVG artifacts, then the final manifest.
// Exit code: 0 success; 1 numeric failure during normal operation (node
// formation, blow-up, calibration failure); 2 usage error (unknown key,
// type mismatch, precondition violation).
int run(const RunConfig& cfg);

// main() body: parse + run; parse-stage errors print usage to stderr and
// return 2.
int run_cli(int argc, char** argv);

}  // namespace qhlab
