#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qhlab {

// Provenance record for one run. Written as manifest.txt (one `key = value`
// per line) into the output directory before any compute so a crash still
// leaves a valid record; rewritten with the outcome at the end.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> parameters;  // echoed config, sorted
    std::string tool_version = "qhlab 1.0.0";
    std::string grid_description;  // e.g. "[-32, 32) n=4096 dx=0.015625"
    std::string started_at;        // UTC, ISO 8601
    std::string finished_at;
    std::vector<std::string> output_files;  // paths relative to the output dir
    std::string status = "running";         // running | complete | error | usage-error
    std::string detail;                     // failure explanation when status != complete
};

std::string utc_timestamp();

// Serializes to dir/manifest.txt. Overwrites any previous version.
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);

}  // namespace qhlab
