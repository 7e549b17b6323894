#include "readlab/llm_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#ifdef CPPHTTPLIB_OPENSSL_SUPPORT
// keep httplib's own define; nothing extra required here
#endif
#include <httplib.h>

#include "readlab/hash.hpp"
#include "readlab/prompts.hpp"
#include "readlab/util.hpp"

namespace readlab {

using json = nlohmann::json;

std::string GatewayConfig::describe() const {
    std::ostringstream out;
    if (backend == Backend::Stub) {
        out << "stub";
        if (stub_policy) {
            switch (stub_policy->kind) {
                case StubPolicy::Kind::ConstantText:
                    out << ":constant:" << stub_policy->constant_text;
                    break;
                case StubPolicy::Kind::MajorityEcho:
                    out << ":majority-echo";
                    break;
                case StubPolicy::Kind::ShotEcho:
                    out << ":shot-echo";
                    break;
            }
        }
    } else {
        out << "remote:" << model_name;
    }
    return out.str();
}

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool contains_word(const std::string& lower_text, std::string_view word) {
    std::size_t pos = 0;
    while ((pos = lower_text.find(word, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !is_word_char(lower_text[pos - 1]);
        std::size_t end = pos + word.size();
        bool right_ok = end == lower_text.size() || !is_word_char(lower_text[end]);
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

// Whitespace-token overlap; used by the shot-echo stub to pick the example
// closest to the target.
double lexical_similarity(const std::string& a, const std::string& b) {
    auto tokens = [](const std::string& text) {
        std::set<std::string> out;
        std::string current;
        for (char c : text) {
            if (std::isspace(static_cast<unsigned char>(c))) {
                if (!current.empty()) out.insert(current);
                current.clear();
            } else {
                current.push_back(c);
            }
        }
        if (!current.empty()) out.insert(current);
        return out;
    };
    std::set<std::string> ta = tokens(a), tb = tokens(b);
    if (ta.empty() && tb.empty()) return 1.0;
    std::size_t common = 0;
    for (const std::string& t : ta) common += tb.count(t);
    std::size_t unioned = ta.size() + tb.size() - common;
    return unioned == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(unioned);
}

}  // namespace

ReadabilityLabel parse_label(const std::string& raw_text) {
    if (raw_text.empty()) throw GatewayError("parse_label: empty completion");
    std::string lower(raw_text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    // longest match first: Unreadable before Readable
    std::vector<ReadabilityLabel> found;
    if (contains_word(lower, "unreadable")) found.push_back(ReadabilityLabel::Unreadable);
    if (contains_word(lower, "neutral")) found.push_back(ReadabilityLabel::Neutral);
    if (contains_word(lower, "readable")) found.push_back(ReadabilityLabel::Readable);
    if (found.empty()) {
        throw GatewayError("parse_label: no label word in completion: '" + raw_text + "'");
    }
    if (found.size() > 1) {
        throw GatewayError("parse_label: ambiguous completion with multiple label words: '" +
                           raw_text + "'");
    }
    return found.front();
}

struct Gateway::Slots {
    explicit Slots(int count) : sem(count) {}
    std::counting_semaphore<> sem;
};

Gateway::Gateway(GatewayConfig config) : config_(std::move(config)) {
    if (config_.max_concurrent_requests < 1) {
        throw GatewayError("gateway: max_concurrent_requests must be >= 1");
    }
    if (config_.max_retries < 0) throw GatewayError("gateway: max_retries must be >= 0");
    if (config_.backend == GatewayConfig::Backend::Stub && !config_.stub_policy) {
        throw GatewayError("gateway: stub backend requires a stub policy");
    }
    if (config_.backend == GatewayConfig::Backend::RemoteHttp) {
        // config validation: reject a remote setup before any request goes out
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw GatewayError("remote gateway: credential environment variable " +
                               config_.api_key_env + " is not set");
        }
        if (config_.endpoint.empty()) {
            throw GatewayError("remote gateway: no endpoint URL configured");
        }
    }
    slots_ = std::make_unique<Slots>(config_.max_concurrent_requests);
    if (!config_.cache_dir.empty()) std::filesystem::create_directories(config_.cache_dir);
}

Gateway::~Gateway() = default;

void Gateway::set_majority_table(std::map<std::string, ReadabilityLabel> source_to_label) {
    majority_table_ = std::move(source_to_label);
}

std::filesystem::path Gateway::cache_file(const std::string& key) const {
    // key carries the model name, which may contain path separators
    std::string name;
    for (char c : key) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '-' || c == '_' || c == '.';
        name.push_back(ok ? c : '_');
    }
    return config_.cache_dir / (name + ".json");
}

std::optional<std::string> Gateway::cache_lookup(const std::string& key) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = memory_cache_.find(key);
        if (it != memory_cache_.end()) return it->second;
    }
    if (config_.cache_dir.empty()) return std::nullopt;
    std::ifstream in(cache_file(key));
    if (!in) return std::nullopt;
    try {
        json doc = json::parse(in);
        std::string text = doc.at("raw_text").get<std::string>();
        std::lock_guard<std::mutex> lock(mu_);
        memory_cache_[key] = text;
        return text;
    } catch (const json::exception&) {
        return std::nullopt;  // treat a corrupt cache entry as a miss
    }
}

void Gateway::cache_store(const std::string& key, const std::string& raw_text) {
    std::lock_guard<std::mutex> lock(mu_);
    memory_cache_[key] = raw_text;
    if (config_.cache_dir.empty()) return;
    json doc = {{"model", config_.model_name}, {"key", key}, {"raw_text", raw_text}};
    std::ofstream out(cache_file(key));
    out << doc.dump(2) << "\n";
}

std::string Gateway::stub_complete(const std::string& prompt) const {
    const StubPolicy& policy = *config_.stub_policy;
    switch (policy.kind) {
        case StubPolicy::Kind::ConstantText:
            return policy.constant_text;
        case StubPolicy::Kind::MajorityEcho: {
            std::optional<std::string> target = extract_prompt_target(prompt);
            if (!target) throw GatewayError("majority-echo stub: unrecognized prompt shape");
            auto it = majority_table_.find(*target);
            if (it == majority_table_.end()) {
                throw GatewayError("majority-echo stub: no table entry for target snippet");
            }
            return std::string(label_word(it->second));
        }
        case StubPolicy::Kind::ShotEcho: {
            std::optional<std::string> target = extract_prompt_target(prompt);
            std::vector<PromptShot> shots = extract_prompt_shots(prompt);
            if (!target || shots.empty()) {
                throw GatewayError("shot-echo stub: prompt carries no examples");
            }
            std::size_t best = 0;
            double best_score = -1.0;
            for (std::size_t i = 0; i < shots.size(); ++i) {
                double score = lexical_similarity(shots[i].source, *target);
                if (score > best_score) {  // ties keep the earlier shot
                    best_score = score;
                    best = i;
                }
            }
            return std::string(label_word(shots[best].label));
        }
    }
    throw GatewayError("stub: unknown policy");
}

std::string Gateway::remote_complete(const std::string& prompt, int* attempts_used) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw GatewayError("remote gateway: credential environment variable " +
                           config_.api_key_env + " is not set");
    }
    if (config_.endpoint.empty()) {
        throw GatewayError("remote gateway: no endpoint URL configured");
    }
    // split the URL into client base and request path
    std::size_t scheme_end = config_.endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw GatewayError("remote gateway: endpoint must be an http(s) URL");
    }
    std::size_t path_start = config_.endpoint.find('/', scheme_end + 3);
    std::string base = path_start == std::string::npos ? config_.endpoint
                                                       : config_.endpoint.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : config_.endpoint.substr(path_start);

    json body = {
        {"model", config_.model_name},
        {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", config_.temperature},
    };
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_retries + 1; ++attempt) {
        *attempts_used = attempt;
        httplib::Client client(base);
        auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.request_timeout);
        time_t timeout_s = std::max<time_t>(1, seconds.count());
        client.set_connection_timeout(timeout_s, 0);
        client.set_read_timeout(timeout_s, 0);
        client.set_write_timeout(timeout_s, 0);
        httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};

        auto res = client.Post(path, headers, payload, "application/json");
        if (res) {
            if (res->status == 200) {
                try {
                    json doc = json::parse(res->body);
                    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
                } catch (const json::exception& e) {
                    throw GatewayError(std::string("remote gateway: malformed response body: ") +
                                       e.what());
                }
            }
            if (res->status == 401 || res->status == 403) {
                throw GatewayError("remote gateway: authentication rejected (HTTP " +
                                   std::to_string(res->status) + ")");
            }
            if (res->status != 429 && res->status < 500) {
                throw GatewayError("remote gateway: HTTP " + std::to_string(res->status));
            }
            last_error = "HTTP " + std::to_string(res->status);
        } else {
            last_error = "transport failure (" + httplib::to_string(res.error()) + ")";
        }
        if (attempt <= config_.max_retries) {
            std::this_thread::sleep_for(config_.backoff_base * (1 << (attempt - 1)));
        }
    }
    throw GatewayError("remote gateway: retries exhausted: " + last_error);
}

Completion Gateway::complete(const std::string& prompt, bool bypass_cache) {
    if (prompt.empty()) throw GatewayError("complete: empty prompt");
    Completion completion;
    completion.prompt_hash = content_hash(prompt);
    const std::string key = config_.model_name + "-" + completion.prompt_hash;

    if (!bypass_cache) {
        if (std::optional<std::string> cached = cache_lookup(key)) {
            completion.raw_text = *cached;
            completion.attempt = 0;
            std::lock_guard<std::mutex> lock(mu_);
            ++hits_;
            log_.push_back({completion.prompt_hash, 0, true});
            return completion;
        }
    }

    slots_->sem.acquire();
    auto start = std::chrono::steady_clock::now();
    int attempts = 1;
    std::string raw;
    try {
        if (config_.backend == GatewayConfig::Backend::Stub) {
            raw = stub_complete(prompt);
        } else {
            raw = remote_complete(prompt, &attempts);
        }
    } catch (...) {
        slots_->sem.release();
        throw;
    }
    slots_->sem.release();
    completion.latency = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - start);
    completion.attempt = attempts;
    completion.raw_text = raw;

    cache_store(key, raw);
    {
        std::lock_guard<std::mutex> lock(mu_);
        ++misses_;
        log_.push_back({completion.prompt_hash, attempts, false});
    }
    return completion;
}

std::size_t Gateway::cache_hits() const {
    std::lock_guard<std::mutex> lock(mu_);
    return hits_;
}

std::size_t Gateway::cache_misses() const {
    std::lock_guard<std::mutex> lock(mu_);
    return misses_;
}

std::vector<RequestLogEntry> Gateway::request_log() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_;
}

std::optional<ReadabilityLabel> complete_label(Gateway& gateway, const std::string& prompt) {
    const int budget = gateway.config().max_retries + 1;
    for (int attempt = 1; attempt <= budget; ++attempt) {
        std::string raw;
        try {
            raw = gateway.complete(prompt, /*bypass_cache=*/attempt > 1).raw_text;
        } catch (const GatewayError&) {
            return std::nullopt;  // transport/auth failure -> abstention
        }
        try {
            return parse_label(raw);
        } catch (const GatewayError&) {
            // unparseable or ambiguous completion; retry within budget
        }
    }
    return std::nullopt;
}

}  // namespace readlab
