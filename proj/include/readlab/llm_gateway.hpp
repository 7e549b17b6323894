#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "readlab/corpus.hpp"

namespace readlab {

struct StubPolicy {
    enum class Kind {
        ConstantText,   // always the same completion text
        MajorityEcho,   // echoes the snippet's most common label (needs a table)
        ShotEcho,       // echoes the label of the lexically closest shot
    };
    Kind kind = Kind::ConstantText;
    std::string constant_text = "Readable";
};

struct GatewayConfig {
    enum class Backend { Stub, RemoteHttp };

    Backend backend = Backend::Stub;
    std::string model_name = "stub";
    double temperature = 0.0;  // fixed at 0 for every protocol run
    int max_retries = 3;
    std::chrono::milliseconds request_timeout{30000};
    std::chrono::milliseconds backoff_base{1000};  // 1s, then doubled per retry
    int max_concurrent_requests = 4;
    std::optional<StubPolicy> stub_policy;
    std::string endpoint;  // remote only; full URL of the chat-completion route
    std::string api_key_env = "READABILITY_LAB_API_KEY";
    std::filesystem::path cache_dir;  // empty disables the on-disk completion cache

    // Stable textual identity used inside run fingerprints.
    std::string describe() const;
};

struct Completion {
    std::string prompt_hash;
    std::string raw_text;
    std::chrono::microseconds latency{0};
    int attempt = 1;
};

// Case-insensitive word-boundary scan for the three label words; Unreadable is
// checked before Readable so the substring never misfires. Throws GatewayError
// when no label word or more than one distinct label word occurs.
ReadabilityLabel parse_label(const std::string& raw_text);

struct RequestLogEntry {
    std::string prompt_hash;
    int attempt = 0;
    bool cache_hit = false;
};

// Uniform chat-completion interface over a remote HTTP backend or the
// deterministic stub family. Thread-safe; at most max_concurrent_requests
// backend calls are in flight, and completions are memoized in memory plus an
// optional on-disk cache keyed by (model_name, prompt_hash).
class Gateway {
public:
    explicit Gateway(GatewayConfig config);
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    // Reference data for the majority-echo stub: exact source text -> label.
    void set_majority_table(std::map<std::string, ReadabilityLabel> source_to_label);

    Completion complete(const std::string& prompt, bool bypass_cache = false);

    const GatewayConfig& config() const { return config_; }
    std::size_t cache_hits() const;
    std::size_t cache_misses() const;
    std::vector<RequestLogEntry> request_log() const;

private:
    std::string stub_complete(const std::string& prompt) const;
    std::string remote_complete(const std::string& prompt, int* attempts_used);
    std::optional<std::string> cache_lookup(const std::string& key);
    void cache_store(const std::string& key, const std::string& raw_text);
    std::filesystem::path cache_file(const std::string& key) const;

    GatewayConfig config_;
    std::map<std::string, ReadabilityLabel> majority_table_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::string> memory_cache_;
    std::vector<RequestLogEntry> log_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
    struct Slots;
    std::unique_ptr<Slots> slots_;
};

// Completion plus label parsing with a retry budget for unparseable output;
// nullopt means the caller should record an abstention.
std::optional<ReadabilityLabel> complete_label(Gateway& gateway, const std::string& prompt);

}  // namespace readlab
