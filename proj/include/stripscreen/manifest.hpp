#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace stripscreen {

inline constexpr std::string_view kToolVersion = "stripscreen 1.0.0";

// Written next to every run's outputs; re-running the recorded subcommand
// with the recorded flags reproduces the outputs byte-exactly. Contains no
// timestamps for that reason.
struct RunManifest {
    std::string subcommand;
    std::uint64_t seed = 0;
    nlohmann::json resolved;  // resolved flags and config values
    std::vector<std::pair<std::string, std::string>> inputs;  // path, content hash
    std::vector<std::string> outputs;
};

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

}  // namespace stripscreen
