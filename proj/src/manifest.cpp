#include "qhlab/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>

#include "qhlab/errors.hpp"

namespace qhlab {

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm_utc.tm_year + 1900,
                  tm_utc.tm_mon + 1, tm_utc.tm_mday, tm_utc.tm_hour, tm_utc.tm_min,
                  tm_utc.tm_sec);
    return buf;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
    const std::filesystem::path path = dir / "manifest.txt";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("manifest: cannot open '" + path.string() + "' for writing");
    out << "command = " << m.command << '\n';
    out << "tool_version = " << m.tool_version << '\n';
    out << "status = " << m.status << '\n';
    if (!m.detail.empty()) out << "detail = " << m.detail << '\n';
    out << "started_at = " << m.started_at << '\n';
    out << "finished_at = " << m.finished_at << '\n';
    if (!m.grid_description.empty()) out << "grid = " << m.grid_description << '\n';
    for (const auto& [key, value] : m.parameters) out << "param." << key << " = " << value << '\n';
    out << "output_count = " << m.output_files.size() << '\n';
    for (std::size_t i = 0; i < m.output_files.size(); ++i)
        out << "output." << i << " = " << m.output_files[i] << '\n';
    if (!out) throw ConfigError("manifest: write failed for '" + path.string() + "'");
}

}  // namespace qhlab
