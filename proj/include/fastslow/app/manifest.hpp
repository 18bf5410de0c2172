#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace fastslow::app {

inline constexpr std::string_view kToolVersion = "fastslow 1.0.0";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Writes `content` to dir/name, creating dir if needed.
void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& content);

/// [{"file", "bytes", "sha256"}] for the named files under dir, in the given order.
nlohmann::json file_inventory(const std::filesystem::path& dir, const std::vector<std::string>& files);

/// Manifest object: scenario snapshot, tool version, wall time, file inventory
/// and a free-form summary.
nlohmann::json make_manifest(const nlohmann::json& scenario, double wall_seconds,
                             const std::filesystem::path& dir, const std::vector<std::string>& files,
                             const nlohmann::json& summary = nlohmann::json::object());

}  // namespace fastslow::app
