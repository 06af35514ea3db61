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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "hintforge/analytics.hpp"
#include "hintforge/builder.hpp"
#include "hintforge/eval.hpp"
#include "hintforge/gateway.hpp"
#include "hintforge/probe.hpp"
#include "hintforge/segment.hpp"
#include "hintforge/verify.hpp"

namespace hintforge::config {

/// One model endpoint (or deterministic double). kind selects the backend:
///   "http"            OpenAI-compatible chat completions
///   "replay"          cassette replay (cassette path required)
///   "scripted_traces" fixed raw traces per problem (traces_file required)
///   "scripted_oracle" success-scripted instruct double (oracle_file +
///                     traces_file required)
struct BackendConfig {
    std::string kind;
    std::string model = "mock";
    std::string base_url;
    std::string api_key_env = "HINTFORGE_API_KEY";
    bool native_multi_sample = true;
    int timeout_seconds = 120;
    gateway::RetryPolicy retry;
    std::filesystem::path cassette;
    std::filesystem::path traces_file;
    std::filesystem::path oracle_file;
    std::filesystem::path record_to;  // wrap with a recording cassette when set
    std::optional<std::uint64_t> request_budget;
};

struct IoPaths {
    std::filesystem::path problems;
    std::filesystem::path traces;
    std::filesystem::path segmented;
    std::filesystem::path probes;
    std::filesystem::path sweeps;
    std::filesystem::path sweep_analysis;
    std::filesystem::path sweep_csv;  // optional
    std::filesystem::path dataset;
    std::filesystem::path manifest;
    std::filesystem::path stats;
    std::filesystem::path eval_report;
    std::filesystem::path samples;  // optional per-sample dump
};

struct PipelineConfig {
    std::optional<std::int64_t> seed;
    std::size_t max_in_flight = 8;
    double error_threshold = 0.5;  // tolerated fraction of per-problem failures

    segment::MarkerSet markers = segment::MarkerSet::defaults();
    segment::ThinkDelimiters delimiters;
    analytics::TokenCounter counter;

    IoPaths io;

    BackendConfig reason;
    BackendConfig instruct;
    std::optional<BackendConfig> judge;

    gateway::SamplingParams generation_params{0.6, 0.95, 32768, 1, std::nullopt};
    probe::ProbeConfig probe;
    std::optional<std::uint64_t> probe_budget;
    build::BuilderConfig builder;
    verify::VerifyPolicy verify_policy;
    eval::EvalConfig eval;

    /// Parses the JSON config; relative paths are resolved against the config
    /// file's directory. Throws ConfigError naming the offending key.
    static PipelineConfig load(const std::filesystem::path& path);
};

}  // namespace hintforge::config
