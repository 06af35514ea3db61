// Copyright 2026-present the hintforge project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace hintforge::gateway {

struct SamplingParams {
    double temperature = 0.0;
    double top_p = 1.0;
    std::uint64_t max_new_tokens = 32768;
    std::uint32_t n_samples = 1;
    std::optional<std::int64_t> seed;

    void validate() const;
    nlohmann::json to_json() const;
    static SamplingParams from_json(const nlohmann::json& j);
};

struct ChatMessage {
    std::string role;
    std::string content;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    SamplingParams params;
    std::string model_name;

    void validate() const;  // non-empty message list ending in a user turn

    /// Canonical form covering messages + params + model_name; key order is
    /// fixed so the hash is insensitive to construction order.
    nlohmann::json canonical_json() const;
    std::string content_hash() const;

    static ChatRequest single_user(std::string model, std::string content, SamplingParams params);
};

/// Uniform chat-completion interface. complete() returns exactly
/// params.n_samples reply texts or throws Error (TransportError, AuthError,
/// ReplayMiss, BudgetExceeded, UnknownProblem).
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::vector<std::string> complete(const ChatRequest& request) = 0;
    virtual std::string identity() const = 0;
};

// ---------------------------------------------------------------------------
// Cassettes: content-hash keyed request/reply records for deterministic replay
// ---------------------------------------------------------------------------

struct CassetteEntry {
    std::string hash;
    nlohmann::json request;
    std::vector<std::string> replies;
};

class Cassette {
public:
    Cassette() = default;

    /// Loads JSONL ({"hash","request","replies"} lines; an optional leading
    /// {"meta": ...} line carries recording timestamp and backend identity).
    /// The first entry wins when a hash repeats.
    static Cassette load(const std::filesystem::path& path);

    const std::vector<std::string>* find(const std::string& hash) const;
    /// False (no overwrite) when the hash is already recorded.
    bool insert(std::string hash, nlohmann::json request, std::vector<std::string> replies);
    void save(const std::filesystem::path& path) const;

    std::size_t size() const { return entries_.size(); }
    std::vector<std::string> hashes() const;
    const std::string& recorded_at() const { return recorded_at_; }
    const std::string& backend_identity() const { return backend_identity_; }
    void set_metadata(std::string recorded_at, std::string backend_identity);

private:
    std::vector<CassetteEntry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
    std::string recorded_at_;
    std::string backend_identity_;
};

/// Replays recorded replies; an unknown request hash is a ReplayMiss, never a
/// passthrough.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(Cassette cassette) : cassette_(std::move(cassette)) {}
    std::vector<std::string> complete(const ChatRequest& request) override;
    std::string identity() const override { return "replay"; }

private:
    Cassette cassette_;
};

/// Passes through to an inner backend and appends every exchange to the
/// cassette file. Appends are serialized; the file is flushed on close().
class RecordingBackend : public Backend {
public:
    RecordingBackend(std::filesystem::path cassette_path, Backend& inner);
    ~RecordingBackend() override;

    std::vector<std::string> complete(const ChatRequest& request) override;
    std::string identity() const override { return "record(" + inner_.identity() + ")"; }
    void close();

private:
    std::filesystem::path path_;
    Backend& inner_;
    std::ofstream out_;
    std::set<std::string> seen_hashes_;
    std::mutex mutex_;
    bool closed_ = false;
};

std::unique_ptr<RecordingBackend> record(const std::filesystem::path& cassette_path,
                                         Backend& inner);

// ---------------------------------------------------------------------------
// Scripted backends: deterministic stand-ins for the reasoning/instruct models
// ---------------------------------------------------------------------------

/// Per-problem script for the instruct-model double: the question text it is
/// recognized by, its episode prefixes (index k -> concatenation of the first
/// k episodes), the hint depths at which it should answer correctly, and the
/// answer it gives when it succeeds.
struct ScriptedProblem {
    std::string question;
    std::vector<std::string> prefixes;  // prefixes[0] == ""
    std::set<std::size_t> success_ks;
    std::string answer;
};

/// Recognizes (problem, hint depth) from the rendered prompt itself: the
/// question must prefix the user message and the hint block, when present,
/// must equal one of the scripted episode prefixes. Succeeding probes reply
/// with the scripted answer in a boxed wrapper, failing ones with a fixed
/// wrong answer. Immutable after construction.
class ScriptedOracleBackend : public Backend {
public:
    explicit ScriptedOracleBackend(std::map<std::string, ScriptedProblem> problems)
        : problems_(std::move(problems)) {}

    std::vector<std::string> complete(const ChatRequest& request) override;
    std::string identity() const override { return "scripted-oracle"; }

    /// (problem_id, k) as parsed from a prompt; exposed for tests.
    std::pair<std::string, std::size_t> parse_prompt(std::string_view prompt) const;

    static std::string success_reply(const std::string& answer);
    static std::string failure_reply();

private:
    std::map<std::string, ScriptedProblem> problems_;
};

/// Deterministic reasoning-model double: replies to any prompt whose question
/// it recognizes with a fixed raw trace.
class ScriptedTraceBackend : public Backend {
public:
    struct Entry {
        std::string question;
        std::string raw_trace;
    };

    explicit ScriptedTraceBackend(std::map<std::string, Entry> traces)
        : traces_(std::move(traces)) {}

    std::vector<std::string> complete(const ChatRequest& request) override;
    std::string identity() const override { return "scripted-traces"; }

private:
    std::map<std::string, Entry> traces_;
};

// ---------------------------------------------------------------------------
// HTTP backend (OpenAI-compatible chat completions)
// ---------------------------------------------------------------------------

struct RetryPolicy {
    int max_attempts = 4;
    double initial_backoff_seconds = 1.0;
    double backoff_multiplier = 2.0;
    double jitter_fraction = 0.2;
};

/// Bounds simultaneous requests across all workers sharing the gateway.
class InFlightLimiter {
public:
    explicit InFlightLimiter(std::size_t max_in_flight);
    void acquire();
    void release();

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    std::size_t available_;
};

struct HttpBackendConfig {
    std::string base_url;              // e.g. "http://localhost:8000/v1"
    std::string api_key_env = "HINTFORGE_API_KEY";
    RetryPolicy retry;
    bool native_multi_sample = true;   // false: fan out n_samples sequential calls
    int timeout_seconds = 120;
};

class HttpBackend : public Backend {
public:
    HttpBackend(HttpBackendConfig config, std::shared_ptr<InFlightLimiter> limiter);
    std::vector<std::string> complete(const ChatRequest& request) override;
    std::string identity() const override { return "http(" + config_.base_url + ")"; }

private:
    std::vector<std::string> complete_once(const ChatRequest& request, std::uint32_t n);

    HttpBackendConfig config_;
    std::string host_;       // scheme://host[:port]
    std::string path_;       // endpoint path, ends with /chat/completions
    std::shared_ptr<InFlightLimiter> limiter_;
};

/// Enforces a request budget: the overflowing call fails with BudgetExceeded
/// before reaching the inner backend.
class BudgetedBackend : public Backend {
public:
    BudgetedBackend(Backend& inner, std::uint64_t max_requests)
        : inner_(inner), max_requests_(max_requests) {}

    std::vector<std::string> complete(const ChatRequest& request) override;
    std::string identity() const override { return inner_.identity(); }
    std::uint64_t used() const { return used_.load(); }

private:
    Backend& inner_;
    std::uint64_t max_requests_;
    std::atomic<std::uint64_t> used_{0};
};

}  // namespace hintforge::gateway
