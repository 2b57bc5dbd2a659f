#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "naip/types.hpp"

namespace naip {

inline constexpr const char* kToolVersion = "0.1.0";

// Reproducibility sidecar emitted alongside every output artifact.
struct RunManifest {
    std::string subcommand;
    nlohmann::json config;  // full resolved configuration
    std::uint64_t seed = 0;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    double duration_seconds = 0.0;

    // written as <output>.manifest.json next to the primary output
    void write(const std::string& output_path) const {
        nlohmann::json j;
        j["subcommand"] = subcommand;
        j["config"] = config;
        j["seed"] = seed;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["tool_version"] = kToolVersion;
        j["duration_seconds"] = duration_seconds;
        const std::string path = output_path + ".manifest.json";
        std::ofstream out(path);
        if (!out) throw ValidationError("cannot write manifest: " + path);
        out << j.dump(2) << '\n';
    }
};

class StageTimer {
  public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace naip
