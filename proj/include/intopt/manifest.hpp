#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "intopt/json_io.hpp"

namespace intopt {

/// FNV-1a over the raw bytes, hex-encoded. Content addressing for run inputs.
inline std::string content_hash(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char byte : bytes) {
        h ^= byte;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

/// Every command records what it ran with: the subcommand, the fully resolved
/// configuration, the seed, content hashes of the input files, and the output
/// paths. Reports embed the manifest so they can be regenerated bit for bit.
struct RunManifest {
    std::string subcommand;
    Json config = Json::object();
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> input_hashes;  // (path, hash)
    std::vector<std::string> outputs;

    void add_input(const std::string& path) {
        input_hashes.emplace_back(path, content_hash(read_text_file(path)));
    }

    Json to_json() const {
        Json inputs = Json::array();
        for (const auto& [path, hash] : input_hashes)
            inputs.push_back(Json{{"path", path}, {"hash", hash}});
        Json outs = Json::array();
        for (const auto& o : outputs) outs.push_back(o);
        return Json{{"subcommand", subcommand},
                    {"config", config},
                    {"seed", seed},
                    {"inputs", inputs},
                    {"outputs", outs}};
    }
};

}  // namespace intopt
