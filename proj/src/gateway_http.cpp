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

#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>

#include "hintforge/error.hpp"
#include "hintforge/gateway.hpp"

namespace hintforge::gateway {

namespace {

struct SplitUrl {
    std::string host;  // scheme://authority
    std::string path_prefix;
};

SplitUrl split_url(const std::string& base_url) {
    const std::size_t scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(Err::ConfigError, "base_url must include a scheme: " + base_url);
    }
    const std::size_t path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_start), prefix};
}

bool retryable_status(int status) { return status == 429 || (status >= 500 && status < 600); }

double jittered(double seconds, double fraction) {
    static thread_local std::mt19937 rng{std::random_device{}()};
    std::uniform_real_distribution<double> dist(1.0 - fraction, 1.0 + fraction);
    return seconds * dist(rng);
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig config, std::shared_ptr<InFlightLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {
    const SplitUrl split = split_url(config_.base_url);
    host_ = split.host;
    path_ = split.path_prefix + "/chat/completions";
}

std::vector<std::string> HttpBackend::complete_once(const ChatRequest& request, std::uint32_t n) {
    nlohmann::json body{{"model", request.model_name}, {"n", n}};
    nlohmann::json msgs = nlohmann::json::array();
    for (const ChatMessage& m : request.messages) {
        msgs.push_back({{"role", m.role}, {"content", m.content}});
    }
    body["messages"] = std::move(msgs);
    body["temperature"] = request.params.temperature;
    body["top_p"] = request.params.top_p;
    body["max_tokens"] = request.params.max_new_tokens;
    if (request.params.seed) body["seed"] = *request.params.seed;

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key != nullptr && *key != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    double backoff = config_.retry.initial_backoff_seconds;
    std::string last_failure = "no attempts made";
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(std::chrono::duration<double>(
                jittered(backoff, config_.retry.jitter_fraction)));
            backoff *= config_.retry.backoff_multiplier;
        }

        httplib::Client client(host_);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);

        httplib::Result res = client.Post(path_, headers, body.dump(), "application/json");
        if (!res) {
            last_failure = "transport failure: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 401 || res->status == 403) {
            throw Error(Err::AuthError,
                        "credentials rejected (HTTP " + std::to_string(res->status) + ")");
        }
        if (retryable_status(res->status)) {
            last_failure = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw Error(Err::TransportError,
                        "HTTP " + std::to_string(res->status) + ": " + res->body);
        }

        nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("choices")) {
            throw Error(Err::TransportError, "malformed chat-completions response");
        }
        std::vector<std::string> replies;
        for (const nlohmann::json& choice : parsed["choices"]) {
            replies.push_back(choice.at("message").at("content").get<std::string>());
        }
        if (replies.size() != n) {
            throw Error(Err::TransportError,
                        "expected " + std::to_string(n) + " choices, got " +
                            std::to_string(replies.size()));
        }
        return replies;
    }
    throw Error(Err::TransportError, "retries exhausted after " +
                                         std::to_string(config_.retry.max_attempts) +
                                         " attempts; last: " + last_failure);
}

std::vector<std::string> HttpBackend::complete(const ChatRequest& request) {
    request.validate();
    struct Guard {
        InFlightLimiter* limiter;
        ~Guard() {
            if (limiter != nullptr) limiter->release();
        }
    } guard{nullptr};
    if (limiter_) {
        limiter_->acquire();
        guard.limiter = limiter_.get();
    }

    const std::uint32_t n = request.params.n_samples;
    if (config_.native_multi_sample || n == 1) {
        return complete_once(request, n);
    }
    std::vector<std::string> replies;
    replies.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::vector<std::string> one = complete_once(request, 1);
        replies.push_back(std::move(one.front()));
    }
    return replies;
}

}  // namespace hintforge::gateway
