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

#include "hintforge/builder.hpp"

#include "hintforge/hash.hpp"
#include "hintforge/jsonl.hpp"
#include "hintforge/prompts.hpp"
#include "hintforge/version.hpp"

namespace hintforge::build {

void BuilderConfig::validate() const {
    if (p0_text.empty()) throw Error(Err::ConfigError, "p0_text must be non-empty");
    if (delimiters.open.empty() || delimiters.close.empty()) {
        throw Error(Err::ConfigError, "think delimiters must be non-empty");
    }
}

nlohmann::json BuilderConfig::to_json() const {
    return {{"p0_text", p0_text},
            {"delimiters", {{"open", delimiters.open}, {"close", delimiters.close}}},
            {"answer_source",
             answer_source == AnswerSource::trace_answer ? "trace_answer" : "gold_boxed"}};
}

std::string BuilderConfig::config_hash() const { return fnv1a64_hex(to_json().dump()); }

nlohmann::json TrainingSample::to_json() const {
    return {{"problem_id", problem_id},   {"prompt", prompt},
            {"response", response},       {"state", probe::state_name(state)},
            {"think_tokens", think_tokens}, {"answer_tokens", answer_tokens}};
}

TrainingSample TrainingSample::from_json(const nlohmann::json& j) {
    TrainingSample s;
    s.problem_id = j.at("problem_id").get<std::string>();
    s.prompt = j.at("prompt").get<std::string>();
    s.response = j.at("response").get<std::string>();
    s.state = probe::state_from_name(j.at("state").get<std::string>());
    s.think_tokens = j.at("think_tokens").get<std::uint64_t>();
    s.answer_tokens = j.at("answer_tokens").get<std::uint64_t>();
    return s;
}

namespace {

std::string pick_answer(const probe::Problem& problem, const segment::ReasoningTrace& trace,
                        const BuilderConfig& config) {
    const std::string boxed_gold =
        problem.answer.empty() ? std::string()
                               : "The answer is $\\boxed{" + problem.answer + "}$.";
    const std::string& primary = config.answer_source == BuilderConfig::AnswerSource::trace_answer
                                     ? trace.answer_text
                                     : boxed_gold;
    const std::string& fallback = config.answer_source == BuilderConfig::AnswerSource::trace_answer
                                      ? boxed_gold
                                      : trace.answer_text;
    if (!primary.empty()) return primary;
    if (!fallback.empty()) return fallback;
    throw Error(Err::EmptyAnswer,
                "no answer available for problem " + problem.id +
                    ": trace answer and gold answer are both empty");
}

}  // namespace

TrainingSample build_response(const probe::Problem& problem, const segment::ReasoningTrace& trace,
                              const probe::MinEffectiveHint& hint, const BuilderConfig& config,
                              const analytics::TokenCounter& counter) {
    config.validate();
    if (hint.problem_id != trace.problem_id || problem.id != trace.problem_id) {
        throw Error(Err::EpisodeCountMismatch,
                    "problem/trace/hint ids disagree: " + problem.id + " / " + trace.problem_id +
                        " / " + hint.problem_id);
    }
    if (hint.n_episodes != trace.episodes.size()) {
        throw Error(Err::EpisodeCountMismatch,
                    "hint expects " + std::to_string(hint.n_episodes) + " episodes, trace has " +
                        std::to_string(trace.episodes.size()));
    }

    const probe::CognitiveState state = probe::assign_state(hint.k_star, hint.n_episodes);
    std::string body;
    switch (state) {
        case probe::CognitiveState::NoHint:
            body = config.p0_text;
            break;
        case probe::CognitiveState::SparseHint:
            body = segment::join_prefix(trace.episodes, hint.k_star);
            break;
        case probe::CognitiveState::FullHint:
            body = trace.think_text;
            break;
    }

    const std::string answer = pick_answer(problem, trace, config);

    TrainingSample sample;
    sample.problem_id = problem.id;
    sample.prompt = prompts::render_standard(problem.question);
    sample.response =
        config.delimiters.open + "\n" + body + "\n" + config.delimiters.close + "\n" + answer;
    sample.state = state;
    sample.think_tokens = counter.count(body);
    sample.answer_tokens = counter.count(answer);
    return sample;
}

Partition partition(const std::vector<TrainingSample>& samples) {
    Partition parts;
    for (const TrainingSample& s : samples) {
        switch (s.state) {
            case probe::CognitiveState::NoHint: parts.no_hint.push_back(s); break;
            case probe::CognitiveState::SparseHint: parts.sparse_hint.push_back(s); break;
            case probe::CognitiveState::FullHint: parts.full_hint.push_back(s); break;
        }
    }
    return parts;
}

nlohmann::json Manifest::to_json() const {
    return {{"counts",
             {{"no_hint", no_hint}, {"sparse_hint", sparse_hint}, {"full_hint", full_hint}}},
            {"config_hash", config_hash},
            {"version", version}};
}

Manifest write_dataset(const std::vector<TrainingSample>& samples,
                       const std::filesystem::path& dataset_path,
                       const std::filesystem::path& manifest_path, const BuilderConfig& config) {
    std::vector<nlohmann::json> records;
    records.reserve(samples.size());
    Manifest manifest;
    for (const TrainingSample& s : samples) {
        records.push_back(s.to_json());
        switch (s.state) {
            case probe::CognitiveState::NoHint: ++manifest.no_hint; break;
            case probe::CognitiveState::SparseHint: ++manifest.sparse_hint; break;
            case probe::CognitiveState::FullHint: ++manifest.full_hint; break;
        }
    }
    manifest.config_hash = config.config_hash();
    manifest.version = kVersion;

    jsonl::write_file(dataset_path, records);
    jsonl::write_text_file(manifest_path, manifest.to_json().dump(2) + "\n");
    return manifest;
}

}  // namespace hintforge::build
