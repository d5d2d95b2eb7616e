#include "civ/cli/manifest.hpp"

#include <cstdlib>

namespace civ::cli {

void to_json(nlohmann::json& j, const RunManifest& m) {
    j = {{"subcommand", m.subcommand},         {"config", m.config},
         {"seeds", m.seeds},                   {"tool_version", m.tool_version},
         {"outputs", m.outputs},               {"duration_seconds", m.duration_seconds}};
}

void from_json(const nlohmann::json& j, RunManifest& m) {
    j.at("subcommand").get_to(m.subcommand);
    m.config = j.at("config");
    j.at("seeds").get_to(m.seeds);
    j.at("tool_version").get_to(m.tool_version);
    j.at("outputs").get_to(m.outputs);
    j.at("duration_seconds").get_to(m.duration_seconds);
}

std::optional<std::filesystem::path> default_output_dir() {
    const char* env = std::getenv("CIV_OUTPUT_DIR");
    if (env == nullptr || *env == '\0') return std::nullopt;
    return std::filesystem::path(env);
}

std::optional<std::filesystem::path> manifest_path(const std::string& subcommand,
                                                   const std::optional<std::filesystem::path>& out_dir,
                                                   const std::optional<std::filesystem::path>& out_file) {
    std::string stem = subcommand;
    for (char& c : stem) {
        if (c == ' ') c = '_';
    }
    if (out_dir) return *out_dir / "run_manifest.json";
    if (out_file) {
        auto p = *out_file;
        p += ".manifest.json";
        return p;
    }
    if (auto env = default_output_dir()) return *env / (stem + ".manifest.json");
    return std::nullopt;
}

}  // namespace civ::cli
