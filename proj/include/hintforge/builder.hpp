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
#include <string>
#include <vector>

#include <json.hpp>

#include "hintforge/analytics.hpp"
#include "hintforge/probe.hpp"
#include "hintforge/segment.hpp"

namespace hintforge::build {

struct BuilderConfig {
    std::string p0_text = "I don't need deep thinking.";  // body of a no-hint response
    segment::ThinkDelimiters delimiters;
    enum class AnswerSource { trace_answer, gold_boxed };
    AnswerSource answer_source = AnswerSource::trace_answer;

    void validate() const;
    nlohmann::json to_json() const;
    std::string config_hash() const;
};

struct TrainingSample {
    std::string problem_id;
    std::string prompt;    // question + step-by-step directive
    std::string response;  // single think block + answer section
    probe::CognitiveState state = probe::CognitiveState::NoHint;
    std::uint64_t think_tokens = 0;
    std::uint64_t answer_tokens = 0;

    nlohmann::json to_json() const;
    static TrainingSample from_json(const nlohmann::json& j);
};

/// Assembles the response for one problem. The think body is the no-hint
/// directive, the first k_star episodes, or the full original think text,
/// chosen by the hint's k_star/N; the answer section comes from the trace
/// (falling back to a boxed gold sentence, or vice versa per answer_source).
/// Throws EpisodeCountMismatch when hint and trace disagree, EmptyAnswer
/// when no answer source has content.
TrainingSample build_response(const probe::Problem& problem, const segment::ReasoningTrace& trace,
                              const probe::MinEffectiveHint& hint, const BuilderConfig& config,
                              const analytics::TokenCounter& counter);

struct Partition {
    std::vector<TrainingSample> no_hint;      // D1
    std::vector<TrainingSample> sparse_hint;  // D2
    std::vector<TrainingSample> full_hint;    // D3
};

/// Splits by state, preserving input order within each part.
Partition partition(const std::vector<TrainingSample>& samples);

struct Manifest {
    std::size_t no_hint = 0;
    std::size_t sparse_hint = 0;
    std::size_t full_hint = 0;
    std::string config_hash;
    std::string version;

    nlohmann::json to_json() const;
};

/// Writes dataset.jsonl next to a manifest JSON; byte-identical across reruns
/// with identical inputs.
Manifest write_dataset(const std::vector<TrainingSample>& samples,
                       const std::filesystem::path& dataset_path,
                       const std::filesystem::path& manifest_path, const BuilderConfig& config);

}  // namespace hintforge::build
