#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace civ::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Provenance record written after every successful command.
struct RunManifest {
    std::string subcommand;
    nlohmann::json config = nlohmann::json::object();
    std::vector<std::uint64_t> seeds;
    std::string tool_version = kToolVersion;
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;

    friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

/// Where the manifest goes: next to the output when there is one, else into
/// $CIV_OUTPUT_DIR, else nowhere (the caller prints it to stderr).
[[nodiscard]] std::optional<std::filesystem::path> manifest_path(const std::string& subcommand,
                                                                 const std::optional<std::filesystem::path>& out_dir,
                                                                 const std::optional<std::filesystem::path>& out_file);

/// Directory named by CIV_OUTPUT_DIR, if set and non-empty.
[[nodiscard]] std::optional<std::filesystem::path> default_output_dir();

}  // namespace civ::cli
