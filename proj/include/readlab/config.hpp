#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "readlab/classifier.hpp"
#include "readlab/llm_gateway.hpp"

namespace readlab {

// Everything that can influence a run's artifacts, serialized into the run
// fingerprint so reruns are verifiable byte-for-byte.
struct RunConfig {
    std::string command;  // e.g. "run-generalist"
    std::string dataset_path;
    std::string dataset_name;
    std::string method;  // feature|llm|oracle or hv|hvl|r
    std::uint64_t seed = 0;
    int k_shots = 3;
    int jobs = 1;
    bool oracle_excludes_target = false;
    Hyperparams hp;
    GatewayConfig gateway;
    std::filesystem::path out_dir;

    // Canonical key=value block hashed into the fingerprint.
    std::string canonical() const;
    std::string fingerprint() const;
};

// Simple `key = value` config file with '#' comments; unknown keys are an
// error so typos do not silently change a run.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

// Applies config-file values onto a RunConfig (flags override afterwards).
void apply_config_entries(RunConfig& config, const std::map<std::string, std::string>& entries);

}  // namespace readlab
