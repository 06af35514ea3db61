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

#include "hintforge/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <random>
#include <thread>

#include "hintforge/error.hpp"
#include "hintforge/hash.hpp"
#include "hintforge/jsonl.hpp"

namespace hintforge::gateway {

void SamplingParams::validate() const {
    if (temperature < 0.0) throw Error(Err::ConfigError, "temperature must be >= 0");
    if (top_p <= 0.0 || top_p > 1.0) throw Error(Err::ConfigError, "top_p must be in (0, 1]");
    if (n_samples < 1) throw Error(Err::ConfigError, "n_samples must be >= 1");
}

nlohmann::json SamplingParams::to_json() const {
    nlohmann::json j{{"temperature", temperature},
                     {"top_p", top_p},
                     {"max_new_tokens", max_new_tokens},
                     {"n_samples", n_samples}};
    if (seed) j["seed"] = *seed;
    return j;
}

SamplingParams SamplingParams::from_json(const nlohmann::json& j) {
    SamplingParams p;
    p.temperature = j.value("temperature", p.temperature);
    p.top_p = j.value("top_p", p.top_p);
    p.max_new_tokens = j.value("max_new_tokens", p.max_new_tokens);
    p.n_samples = j.value("n_samples", p.n_samples);
    if (j.contains("seed") && !j["seed"].is_null()) p.seed = j["seed"].get<std::int64_t>();
    p.validate();
    return p;
}

void ChatRequest::validate() const {
    if (messages.empty()) throw Error(Err::ConfigError, "chat request has no messages");
    if (messages.back().role != "user") {
        throw Error(Err::ConfigError, "final chat message must have role \"user\"");
    }
    params.validate();
}

nlohmann::json ChatRequest::canonical_json() const {
    nlohmann::json msgs = nlohmann::json::array();
    for (const ChatMessage& m : messages) {
        msgs.push_back({{"content", m.content}, {"role", m.role}});
    }
    // nlohmann objects are key-sorted, so dump() of this is canonical
    return nlohmann::json{
        {"messages", msgs}, {"model_name", model_name}, {"params", params.to_json()}};
}

std::string ChatRequest::content_hash() const { return fnv1a64_hex(canonical_json().dump()); }

ChatRequest ChatRequest::single_user(std::string model, std::string content,
                                     SamplingParams params) {
    ChatRequest req;
    req.messages.push_back({"user", std::move(content)});
    req.params = params;
    req.model_name = std::move(model);
    return req;
}

// ---------------------------------------------------------------------------
// Cassette
// ---------------------------------------------------------------------------

Cassette Cassette::load(const std::filesystem::path& path) {
    Cassette cassette;
    for (const nlohmann::json& record : jsonl::read_file(path)) {
        if (record.contains("meta")) {
            const nlohmann::json& meta = record["meta"];
            cassette.recorded_at_ = meta.value("recorded_at", "");
            cassette.backend_identity_ = meta.value("backend", "");
            continue;
        }
        std::vector<std::string> replies = record.at("replies").get<std::vector<std::string>>();
        cassette.insert(record.at("hash").get<std::string>(), record.value("request", nlohmann::json()),
                        std::move(replies));
    }
    return cassette;
}

const std::vector<std::string>* Cassette::find(const std::string& hash) const {
    auto it = index_.find(hash);
    if (it == index_.end()) return nullptr;
    return &entries_[it->second].replies;
}

bool Cassette::insert(std::string hash, nlohmann::json request,
                      std::vector<std::string> replies) {
    if (index_.contains(hash)) return false;
    index_.emplace(hash, entries_.size());
    entries_.push_back({std::move(hash), std::move(request), std::move(replies)});
    return true;
}

void Cassette::set_metadata(std::string recorded_at, std::string backend_identity) {
    recorded_at_ = std::move(recorded_at);
    backend_identity_ = std::move(backend_identity);
}

std::vector<std::string> Cassette::hashes() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const CassetteEntry& e : entries_) out.push_back(e.hash);
    return out;
}

void Cassette::save(const std::filesystem::path& path) const {
    std::vector<nlohmann::json> records;
    records.push_back({{"meta", {{"recorded_at", recorded_at_}, {"backend", backend_identity_}}}});
    for (const CassetteEntry& e : entries_) {
        records.push_back({{"hash", e.hash}, {"request", e.request}, {"replies", e.replies}});
    }
    jsonl::write_file(path, records);
}

// ---------------------------------------------------------------------------
// Replay / recording
// ---------------------------------------------------------------------------

std::vector<std::string> ReplayBackend::complete(const ChatRequest& request) {
    request.validate();
    const std::string hash = request.content_hash();
    const std::vector<std::string>* replies = cassette_.find(hash);
    if (replies == nullptr) {
        throw Error(Err::ReplayMiss, "cassette has no entry for request hash " + hash);
    }
    return *replies;
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace

RecordingBackend::RecordingBackend(std::filesystem::path cassette_path, Backend& inner)
    : path_(std::move(cassette_path)), inner_(inner) {
    // append to an existing cassette (resumed runs keep earlier recordings);
    // previously recorded hashes stay authoritative via first-wins on load
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path_) || std::filesystem::file_size(path_, ec) == 0;
    if (!fresh) {
        const Cassette existing = Cassette::load(path_);
        for (const std::string& hash : existing.hashes()) seen_hashes_.insert(hash);
    }
    out_.open(path_, fresh ? (std::ios::out | std::ios::trunc) : (std::ios::out | std::ios::app));
    if (!out_) {
        throw Error(Err::StorageError, "cannot open cassette for writing: " + path_.string());
    }
    if (fresh) {
        nlohmann::json meta{
            {"meta", {{"recorded_at", utc_timestamp()}, {"backend", inner_.identity()}}}};
        out_ << meta.dump() << '\n';
    }
}

RecordingBackend::~RecordingBackend() { close(); }

void RecordingBackend::close() {
    std::lock_guard lock(mutex_);
    if (closed_) return;
    out_.flush();
    out_.close();
    closed_ = true;
}

std::vector<std::string> RecordingBackend::complete(const ChatRequest& request) {
    std::vector<std::string> replies = inner_.complete(request);
    const std::string hash = request.content_hash();
    {
        std::lock_guard lock(mutex_);
        if (closed_) throw Error(Err::StorageError, "recording backend already closed");
        // first recording wins, matching Cassette::insert on load
        if (seen_hashes_.insert(hash).second) {
            nlohmann::json record{
                {"hash", hash}, {"request", request.canonical_json()}, {"replies", replies}};
            out_ << record.dump() << '\n';
            if (!out_) {
                throw Error(Err::StorageError, "failed writing cassette: " + path_.string());
            }
        }
    }
    return replies;
}

std::unique_ptr<RecordingBackend> record(const std::filesystem::path& cassette_path,
                                         Backend& inner) {
    return std::make_unique<RecordingBackend>(cassette_path, inner);
}

// ---------------------------------------------------------------------------
// Scripted backends
// ---------------------------------------------------------------------------

namespace {
constexpr std::string_view kHintHeader = "\nHere is a partial reasoning hint:\n";
}

std::string ScriptedOracleBackend::success_reply(const std::string& answer) {
    return "The answer is $\\boxed{" + answer + "}$.";
}

std::string ScriptedOracleBackend::failure_reply() {
    return "I could not determine the result. The answer is $\\boxed{\\text{unknown}}$.";
}

std::pair<std::string, std::size_t> ScriptedOracleBackend::parse_prompt(
    std::string_view prompt) const {
    // longest question match wins so ids whose questions share a prefix resolve
    const ScriptedProblem* best = nullptr;
    std::string best_id;
    for (const auto& [id, entry] : problems_) {
        if (prompt.substr(0, entry.question.size()) == entry.question &&
            (best == nullptr || entry.question.size() > best->question.size())) {
            best = &entry;
            best_id = id;
        }
    }
    if (best == nullptr) {
        throw Error(Err::UnknownProblem, "scripted oracle does not recognize the prompt");
    }
    std::string_view rest = prompt.substr(best->question.size());
    if (rest.substr(0, kHintHeader.size()) != kHintHeader) {
        return {best_id, 0};  // no hint block: probe depth 0 (or a plain eval prompt)
    }
    std::string_view hint_and_tail = rest.substr(kHintHeader.size());
    for (std::size_t k = best->prefixes.size(); k-- > 1;) {  // longest prefix first
        const std::string& prefix = best->prefixes[k];
        if (hint_and_tail.substr(0, prefix.size()) == prefix &&
            hint_and_tail.substr(prefix.size(), 1) == "\n") {
            return {best_id, k};
        }
    }
    throw Error(Err::UnknownProblem,
                "scripted oracle: hint does not match any episode prefix for " + best_id);
}

std::vector<std::string> ScriptedOracleBackend::complete(const ChatRequest& request) {
    request.validate();
    const auto [id, k] = parse_prompt(request.messages.back().content);
    const ScriptedProblem& entry = problems_.at(id);
    const std::string reply =
        entry.success_ks.contains(k) ? success_reply(entry.answer) : failure_reply();
    return std::vector<std::string>(request.params.n_samples, reply);
}

std::vector<std::string> ScriptedTraceBackend::complete(const ChatRequest& request) {
    request.validate();
    const std::string_view prompt = request.messages.back().content;
    const Entry* best = nullptr;
    for (const auto& [id, entry] : traces_) {
        if (prompt.substr(0, entry.question.size()) == entry.question &&
            (best == nullptr || entry.question.size() > best->question.size())) {
            best = &entry;
        }
    }
    if (best == nullptr) {
        throw Error(Err::UnknownProblem, "scripted trace backend does not recognize the prompt");
    }
    return std::vector<std::string>(request.params.n_samples, best->raw_trace);
}

// ---------------------------------------------------------------------------
// In-flight limiting and budgets
// ---------------------------------------------------------------------------

InFlightLimiter::InFlightLimiter(std::size_t max_in_flight)
    : available_(max_in_flight == 0 ? 1 : max_in_flight) {}

void InFlightLimiter::acquire() {
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return available_ > 0; });
    --available_;
}

void InFlightLimiter::release() {
    {
        std::lock_guard lock(mutex_);
        ++available_;
    }
    cv_.notify_one();
}

std::vector<std::string> BudgetedBackend::complete(const ChatRequest& request) {
    std::uint64_t current = used_.load();
    do {
        if (current >= max_requests_) {
            throw Error(Err::BudgetExceeded,
                        "request budget of " + std::to_string(max_requests_) + " exhausted");
        }
    } while (!used_.compare_exchange_weak(current, current + 1));
    return inner_.complete(request);
}

}  // namespace hintforge::gateway
