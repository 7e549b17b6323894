#include "readlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "readlab/hash.hpp"
#include "readlab/prompts.hpp"
#include "readlab/util.hpp"

namespace readlab {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string RunConfig::canonical() const {
    std::ostringstream out;
    out << "command=" << command << "\n"
        << "dataset=" << dataset_name << "\n"
        << "method=" << method << "\n"
        << "seed=" << seed << "\n"
        << "k_shots=" << k_shots << "\n"
        << "oracle_excludes_target=" << (oracle_excludes_target ? 1 : 0) << "\n"
        << "learning_rate=" << fmt(hp.learning_rate) << "\n"
        << "l2_strength=" << fmt(hp.l2_strength) << "\n"
        << "max_epochs=" << hp.max_epochs << "\n"
        << "convergence_tolerance=" << fmt(hp.convergence_tolerance) << "\n"
        << "gateway=" << gateway.describe() << "\n"
        << "temperature=" << fmt(gateway.temperature) << "\n"
        << "feature_schema=" << kFeatureSchemaVersion << "\n"
        << "prompt_schema=" << prompt_schema_hash() << "\n";
    return out.str();
}

std::string RunConfig::fingerprint() const { return content_hash(canonical()); }

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path.string());
    std::map<std::string, std::string> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw UsageError("config file " + path.string() + " line " + std::to_string(line_no) +
                             ": expected key = value");
        }
        std::string key(trim(body.substr(0, eq)));
        std::string value(trim(body.substr(eq + 1)));
        if (key.empty()) {
            throw UsageError("config file " + path.string() + " line " + std::to_string(line_no) +
                             ": empty key");
        }
        entries[key] = value;
    }
    return entries;
}

void apply_config_entries(RunConfig& config, const std::map<std::string, std::string>& entries) {
    for (const auto& [key, value] : entries) {
        try {
            if (key == "seed") {
                config.seed = std::stoull(value);
            } else if (key == "jobs") {
                config.jobs = std::stoi(value);
            } else if (key == "k_shots") {
                config.k_shots = std::stoi(value);
            } else if (key == "learning_rate") {
                config.hp.learning_rate = std::stod(value);
            } else if (key == "l2_strength") {
                config.hp.l2_strength = std::stod(value);
            } else if (key == "max_epochs") {
                config.hp.max_epochs = std::stoi(value);
            } else if (key == "convergence_tolerance") {
                config.hp.convergence_tolerance = std::stod(value);
            } else if (key == "model") {
                config.gateway.model_name = value;
            } else if (key == "endpoint") {
                config.gateway.endpoint = value;
            } else if (key == "max_retries") {
                config.gateway.max_retries = std::stoi(value);
            } else if (key == "request_timeout_ms") {
                config.gateway.request_timeout = std::chrono::milliseconds(std::stoll(value));
            } else if (key == "max_concurrent_requests") {
                config.gateway.max_concurrent_requests = std::stoi(value);
            } else if (key == "cache_dir") {
                config.gateway.cache_dir = value;
            } else if (key == "oracle_excludes_target") {
                config.oracle_excludes_target = value == "1" || value == "true";
            } else {
                throw UsageError("unknown config key: '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw UsageError("config key '" + key + "' has malformed value '" + value + "'");
        } catch (const std::out_of_range&) {
            throw UsageError("config key '" + key + "' has out-of-range value '" + value + "'");
        }
    }
}

}  // namespace readlab
