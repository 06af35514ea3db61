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
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hintforge/analytics.hpp"
#include "hintforge/gateway.hpp"
#include "hintforge/probe.hpp"
#include "hintforge/segment.hpp"
#include "hintforge/verify.hpp"

namespace hintforge::eval {

struct EvalConfig {
    gateway::SamplingParams params{0.6, 0.95, 32768, 16, std::nullopt};
    enum class PromptStyle { standard, budget };
    PromptStyle prompt_style = PromptStyle::standard;
    std::uint64_t budget_tokens = 8000;
    analytics::TokenCounter counter;
    segment::ThinkDelimiters delimiters;
    std::string model_name = "reason";
    bool keep_samples = false;  // retain per-sample outcomes in the report

    void validate() const;
};

std::string render_prompt(std::string_view problem, const EvalConfig& config);

struct SampleOutcome {
    std::size_t sample_idx = 0;
    std::string text;
    bool correct = false;
    std::uint64_t think_tokens = 0;
    std::uint64_t answer_tokens = 0;
    std::uint64_t total_tokens = 0;
};

struct ProblemReport {
    std::string problem_id;
    double accuracy = 0.0;  // successes / n_samples, denominator always n_samples
    double mean_think_tokens = 0.0;
    double mean_total_tokens = 0.0;
    std::optional<std::string> error;  // set when the problem failed irrecoverably
    std::vector<SampleOutcome> samples;

    nlohmann::json to_json() const;
};

struct EvalReport {
    std::vector<ProblemReport> problems;  // sorted by problem_id
    double corpus_accuracy = 0.0;         // mean of per-problem accuracies
    double corpus_mean_think_tokens = 0.0;
    double corpus_mean_total_tokens = 0.0;

    std::size_t failed_problems() const;
    nlohmann::json to_json() const;
    /// Per-sample dump records ({"problem_id","sample_idx","text","correct","think_tokens"}).
    std::vector<nlohmann::json> samples_jsonl() const;
};

/// Token accounting split at the think-tag boundary. Malformed or missing
/// tags count the whole completion as answer tokens with zero think tokens.
struct TokenSplit {
    std::uint64_t think_tokens = 0;
    std::uint64_t answer_tokens = 0;
    std::uint64_t total_tokens = 0;
};
TokenSplit split_tokens(std::string_view completion, const segment::ThinkDelimiters& delims,
                        const analytics::TokenCounter& counter);

/// n-sample generation + verification per problem. Problems that fail
/// irrecoverably are marked with an error instead of aborting the run;
/// corpus aggregates cover the problems that produced samples.
EvalReport evaluate(const std::vector<probe::Problem>& problems, gateway::Backend& backend,
                    const verify::Verifier& verifier, const EvalConfig& config,
                    std::size_t workers = 1);

}  // namespace hintforge::eval
