#include "stripscreen/manifest.hpp"

#include "stripscreen/text.hpp"

namespace stripscreen {

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
    nlohmann::json j;
    j["tool"] = kToolVersion;
    j["subcommand"] = manifest.subcommand;
    j["seed"] = manifest.seed;
    j["resolved"] = manifest.resolved;
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& [file, hash] : manifest.inputs) {
        nlohmann::json entry;
        entry["path"] = file;
        entry["fnv1a64"] = hash;
        inputs.push_back(std::move(entry));
    }
    j["inputs"] = std::move(inputs);
    j["outputs"] = manifest.outputs;
    write_file(path, j.dump(2) + "\n");
}

}  // namespace stripscreen
