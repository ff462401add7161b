#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "logsmith/common.hpp"
#include "logsmith/config.hpp"
#include "logsmith/prompt/prompts.hpp"
#include "logsmith/sha256.hpp"

namespace logsmith::llm {

using json = nlohmann::json;

// Name of the environment variable holding the API key for the http backend.
inline constexpr const char* kApiKeyEnv = "LOGSMITH_API_KEY";

struct LlmConfig {
    std::string backend = "mock";  // "http" or "mock"
    std::string endpoint;          // full URL, e.g. http://host:port/v1/chat/completions
    std::string model = "default";
    double temperature = 0.0;
    int max_tokens = 1024;
    int timeout_s = 60;
    int retries = 2;
    int concurrency = 4;
    std::string mock_dir;
    // Base delay for exponential backoff between retry attempts. Not a config
    // file key; tests shrink it so retry paths run instantly.
    int backoff_base_ms = 250;

    void validate() const {
        if (backend != "http" && backend != "mock")
            throw Error("bad_config", "backend must be 'http' or 'mock', got '" + backend + "'");
        if (temperature < 0.0)
            throw Error("bad_config", "temperature must be >= 0");
        if (retries < 0)
            throw Error("bad_config", "retries must be >= 0");
        if (concurrency < 1)
            throw Error("bad_config", "concurrency must be >= 1");
        if (backend == "http" && endpoint.empty())
            throw Error("bad_config", "http backend requires an endpoint URL");
        if (backend == "mock" && mock_dir.empty())
            throw Error("bad_config", "mock backend requires mock_dir");
    }

    static LlmConfig from_config(const Config& cfg) {
        LlmConfig c;
        c.backend = cfg.get("backend", c.backend);
        c.endpoint = cfg.get("endpoint", c.endpoint);
        c.model = cfg.get("model", c.model);
        c.temperature = cfg.get_double("temperature", c.temperature);
        c.max_tokens = cfg.get_int("max_tokens", c.max_tokens);
        c.timeout_s = cfg.get_int("timeout_s", c.timeout_s);
        c.retries = cfg.get_int("retries", c.retries);
        c.concurrency = cfg.get_int("concurrency", c.concurrency);
        c.mock_dir = cfg.get("mock_dir", c.mock_dir);
        return c;
    }
};

// Canonical prompt text for hashing and audit records: system and user parts
// joined by a newline, every line stripped of trailing whitespace. Leading
// whitespace and blank lines are preserved — they carry code indentation.
inline std::string normalize_prompt(std::string_view system_text, std::string_view user_text) {
    std::string combined(system_text);
    combined += '\n';
    combined += user_text;
    std::vector<std::string> lines = split(combined, '\n');
    for (auto& line : lines) line = rtrim(line);
    return join(lines, "\n");
}

inline std::string prompt_sha256(const prompt::PromptBundle& bundle) {
    return Sha256::hex(normalize_prompt(bundle.system_text, bundle.user_text));
}

struct AuditEntry {
    std::string phase;
    std::string prompt_sha256;
    std::string prompt;
    std::string response;
    long latency_ms = 0;

    json to_json() const {
        return json{{"phase", phase},
                    {"prompt_sha256", prompt_sha256},
                    {"prompt", prompt},
                    {"response", response},
                    {"latency_ms", latency_ms}};
    }

    static AuditEntry from_json(const json& j) {
        AuditEntry e;
        e.phase = j.at("phase").get<std::string>();
        e.prompt_sha256 = j.at("prompt_sha256").get<std::string>();
        e.prompt = j.at("prompt").get<std::string>();
        e.response = j.at("response").get<std::string>();
        e.latency_ms = j.value("latency_ms", 0L);
        return e;
    }
};

inline std::vector<AuditEntry> read_audit(const std::filesystem::path& path) {
    std::vector<AuditEntry> entries;
    for (auto& line : LineBuffer::from_text(read_file(path)).lines) {
        if (trim(line).empty()) continue;
        entries.push_back(AuditEntry::from_json(json::parse(line)));
    }
    return entries;
}

// Writes one keyed mock response file per audit entry, so a recorded session
// can be replayed offline: rerunning against the seeded directory resolves
// every prompt to the recorded response.
inline void seed_mock_from_audit(const std::filesystem::path& audit_file,
                                 const std::filesystem::path& mock_dir) {
    std::filesystem::create_directories(mock_dir);
    for (const auto& e : read_audit(audit_file))
        write_file(mock_dir / (e.prompt_sha256 + ".txt"), e.response);
}

class Gateway {
public:
    explicit Gateway(LlmConfig cfg, std::filesystem::path audit_path = {})
        : cfg_(std::move(cfg)), audit_path_(std::move(audit_path)) {
        cfg_.validate();
        slots_available_ = cfg_.concurrency;
    }

    const LlmConfig& config() const { return cfg_; }

    // Highest number of simultaneously in-flight completions observed so far.
    int peak_in_flight() const {
        std::lock_guard<std::mutex> lock(gate_mutex_);
        return peak_in_flight_;
    }

    std::string complete(const prompt::PromptBundle& bundle) {
        Slot slot(*this);
        std::string normalized = normalize_prompt(bundle.system_text, bundle.user_text);
        std::string hash = Sha256::hex(normalized);

        std::string response;
        long latency_ms = 0;
        if (cfg_.backend == "mock") {
            response = complete_mock(hash);
        } else {
            auto start = std::chrono::steady_clock::now();
            response = complete_http(bundle);
            latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        }

        append_audit(AuditEntry{prompt::phase_name(bundle.phase), hash, normalized,
                                response, latency_ms});
        return response;
    }

private:
    // Bounds in-flight completions to cfg_.concurrency and records the peak.
    struct Slot {
        Gateway& gw;
        explicit Slot(Gateway& g) : gw(g) {
            std::unique_lock<std::mutex> lock(gw.gate_mutex_);
            gw.gate_cv_.wait(lock, [&] { return gw.slots_available_ > 0; });
            gw.slots_available_--;
            gw.in_flight_++;
            gw.peak_in_flight_ = std::max(gw.peak_in_flight_, gw.in_flight_);
        }
        ~Slot() {
            {
                std::lock_guard<std::mutex> lock(gw.gate_mutex_);
                gw.slots_available_++;
                gw.in_flight_--;
            }
            gw.gate_cv_.notify_one();
        }
    };

    std::string complete_mock(const std::string& hash) {
        std::filesystem::path keyed =
            std::filesystem::path(cfg_.mock_dir) / (hash + ".txt");
        if (std::filesystem::exists(keyed)) return read_file(keyed);

        std::lock_guard<std::mutex> lock(playlist_mutex_);
        if (!playlist_loaded_) {
            load_playlist();
            playlist_loaded_ = true;
        }
        if (playlist_pos_ < playlist_.size()) return playlist_[playlist_pos_++];
        throw Error("mock_miss", "no mock response for prompt sha256 " + hash);
    }

    void load_playlist() {
        std::filesystem::path path = std::filesystem::path(cfg_.mock_dir) / "playlist.jsonl";
        if (!std::filesystem::exists(path)) return;
        for (auto& line : LineBuffer::from_text(read_file(path)).lines) {
            if (trim(line).empty()) continue;
            json j = json::parse(line);
            if (j.is_string())
                playlist_.push_back(j.get<std::string>());
            else
                playlist_.push_back(j.at("response").get<std::string>());
        }
    }

    std::string complete_http(const prompt::PromptBundle& bundle) {
        const char* key = std::getenv(kApiKeyEnv);
        if (key == nullptr || *key == '\0')
            throw Error("auth_error",
                        std::string(kApiKeyEnv) + " is not set; refusing to contact provider");

        auto [base, path] = split_endpoint(cfg_.endpoint);
        json body = {{"model", cfg_.model},
                     {"messages",
                      json::array({json{{"role", "system"}, {"content", bundle.system_text}},
                                   json{{"role", "user"}, {"content", bundle.user_text}}})},
                     {"temperature", cfg_.temperature},
                     {"max_tokens", cfg_.max_tokens}};
        std::string payload = body.dump();

        std::string last_failure = "no attempt made";
        for (int attempt = 0; attempt <= cfg_.retries; attempt++) {
            if (attempt > 0) {
                auto delay = std::chrono::milliseconds(
                    static_cast<long>(cfg_.backoff_base_ms) << (attempt - 1));
                std::this_thread::sleep_for(delay);
            }
            httplib::Client client(base);
            client.set_connection_timeout(cfg_.timeout_s);
            client.set_read_timeout(cfg_.timeout_s);
            client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
            httplib::Result res = client.Post(path, payload, "application/json");
            if (!res) {
                last_failure = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 401)
                throw Error("auth_error", "provider rejected the API key (HTTP 401)");
            if (res->status < 200 || res->status >= 300) {
                last_failure = "HTTP " + std::to_string(res->status);
                continue;
            }
            return extract_text(res->body);
        }
        throw Error("provider_unavailable",
                    "gave up after " + std::to_string(cfg_.retries + 1) + " attempt(s) against " +
                        cfg_.endpoint + " (" + last_failure + ")");
    }

    static std::string extract_text(const std::string& body) {
        json j;
        try {
            j = json::parse(body);
        } catch (const json::exception&) {
            throw Error("provider_unavailable", "provider returned unparseable JSON");
        }
        if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
            throw Error("provider_unavailable", "provider response has no choices");
        const json& first = j["choices"][0];
        if (first.contains("message") && first["message"].contains("content"))
            return first["message"]["content"].get<std::string>();
        if (first.contains("text")) return first["text"].get<std::string>();
        throw Error("provider_unavailable", "provider response has no message content");
    }

    // "http://host:port/some/path" -> {"http://host:port", "/some/path"}
    static std::pair<std::string, std::string> split_endpoint(const std::string& url) {
        auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos)
            throw Error("bad_config", "endpoint must be a full URL: " + url);
        auto path_start = url.find('/', scheme_end + 3);
        if (path_start == std::string::npos) return {url, "/"};
        return {url.substr(0, path_start), url.substr(path_start)};
    }

    void append_audit(const AuditEntry& entry) {
        if (audit_path_.empty()) return;
        std::lock_guard<std::mutex> lock(audit_mutex_);
        if (audit_path_.has_parent_path())
            std::filesystem::create_directories(audit_path_.parent_path());
        std::ofstream out(audit_path_, std::ios::binary | std::ios::app);
        if (!out) throw Error("io_error", "cannot append to " + audit_path_.string());
        out << entry.to_json().dump() << '\n';
    }

    LlmConfig cfg_;
    std::filesystem::path audit_path_;

    mutable std::mutex gate_mutex_;
    std::condition_variable gate_cv_;
    int slots_available_ = 0;
    int in_flight_ = 0;
    int peak_in_flight_ = 0;

    std::mutex playlist_mutex_;
    bool playlist_loaded_ = false;
    std::vector<std::string> playlist_;
    size_t playlist_pos_ = 0;

    std::mutex audit_mutex_;
};

}  // namespace logsmith::llm
