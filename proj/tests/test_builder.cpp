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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hintforge/builder.hpp"
#include "hintforge/error.hpp"
#include "hintforge/jsonl.hpp"
#include "testutil.hpp"

using namespace hintforge;
using build::BuilderConfig;
using build::TrainingSample;
using probe::CognitiveState;
using testutil::TempDir;

namespace {

probe::MinEffectiveHint make_hint(const std::string& id, std::size_t k_star, std::size_t n) {
    probe::MinEffectiveHint hint;
    hint.problem_id = id;
    hint.k_star = k_star;
    hint.n_episodes = n;
    hint.state = probe::assign_state(k_star, n);
    return hint;
}

const analytics::TokenCounter kCounter{};

}  // namespace

TEST_CASE("no-hint responses collapse the think block to the directive") {
    probe::Problem problem{"radon", "Compute the mean molecular speed v in the heavy gas radon (Rn) in m/s.",
                           "169", "mock"};
    const segment::ReasoningTrace trace = segment::parse_trace(
        "radon",
        "<think>I may need some deep thinking. Wait, use the kinetic formula. Hmm, plug in the radon molar mass.</think>The mean molecular speed is approximately $\\boxed{169}$ m/s.");
    const TrainingSample sample =
        build::build_response(problem, trace, make_hint("radon", 0, 3), BuilderConfig{}, kCounter);

    CHECK(sample.response ==
          "<think>\nI don't need deep thinking.\n</think>\nThe mean molecular speed is "
          "approximately $\\boxed{169}$ m/s.");
    CHECK(sample.state == CognitiveState::NoHint);
    CHECK(sample.think_tokens == 5);
    CHECK(sample.prompt ==
          "Compute the mean molecular speed v in the heavy gas radon (Rn) in m/s.\n"
          "Please reason step by step, and put your final answer within \\boxed{}.");
}

TEST_CASE("full-hint responses keep the original think text byte for byte") {
    probe::Problem problem{"p", "Q?", "128", ""};
    const segment::ReasoningTrace trace = segment::parse_trace(
        "p", "<think>Try a direct count. Wait, factor into prime blocks. Actually, 2^7 works.</think>The answer is $\\boxed{128}$.");
    const TrainingSample sample =
        build::build_response(problem, trace, make_hint("p", 3, 3), BuilderConfig{}, kCounter);

    const std::string expected_body = trace.think_text;
    CHECK(sample.response == "<think>\n" + expected_body + "\n</think>\nThe answer is $\\boxed{128}$.");
    CHECK(sample.state == CognitiveState::FullHint);
    CHECK(sample.think_tokens == kCounter.count(trace.think_text));
}

TEST_CASE("sparse-hint responses keep exactly the episode prefix") {
    probe::Problem problem{"p", "Q?", "55", ""};
    const segment::ReasoningTrace trace = segment::parse_trace(
        "p", "<think>Pair terms. Wait, sums are equal. Hmm, five pairs. Actually, 55.</think>The answer is $\\boxed{55}$.");
    REQUIRE(trace.episodes.size() == 4);

    const TrainingSample sample =
        build::build_response(problem, trace, make_hint("p", 2, 4), BuilderConfig{}, kCounter);
    const std::string prefix = segment::join_prefix(trace.episodes, 2);
    CHECK(sample.response == "<think>\n" + prefix + "\n</think>\nThe answer is $\\boxed{55}$.");
    CHECK(sample.state == CognitiveState::SparseHint);
    CHECK(prefix == "Pair terms. Wait, sums are equal. ");
}

TEST_CASE("built responses round-trip through think extraction") {
    probe::Problem problem{"p", "Q?", "1", ""};
    const segment::ReasoningTrace trace = segment::parse_trace(
        "p", "<think>alpha. Wait, beta.</think>Answer: $\\boxed{1}$.");
    for (std::size_t k : {std::size_t{0}, std::size_t{1}, std::size_t{2}}) {
        const TrainingSample sample =
            build::build_response(problem, trace, make_hint("p", k, 2), BuilderConfig{}, kCounter);
        auto [think, answer] = segment::extract_think(sample.response);
        CHECK(answer == "\nAnswer: $\\boxed{1}$.");
        CHECK(think.front() == '\n');
        CHECK(think.back() == '\n');
        const std::string body = think.substr(1, think.size() - 2);
        if (k == 0) CHECK(body == "I don't need deep thinking.");
        if (k == 1) CHECK(body == segment::join_prefix(trace.episodes, 1));
        if (k == 2) CHECK(body == trace.think_text);
    }
}

TEST_CASE("think tokens never exceed the original trace") {
    const std::vector<std::string> raws = {
        "<think>one two three. Wait, four five. Hmm, six.</think>A $\\boxed{1}$.",
        "<think>a b c d e f g h. Actually, i j. Hold on, k.</think>B $\\boxed{2}$.",
        "<think>left right. On second thought, up down. Wait, strange loop here.</think>C $\\boxed{3}$."};
    for (const std::string& raw : raws) {
        const segment::ReasoningTrace trace = segment::parse_trace("p", raw);
        probe::Problem problem{"p", "Q?", "1", ""};
        const std::uint64_t original = kCounter.count(trace.think_text);
        for (std::size_t k = 0; k <= trace.episodes.size(); ++k) {
            const TrainingSample sample = build::build_response(
                problem, trace, make_hint("p", k, trace.episodes.size()), BuilderConfig{}, kCounter);
            if (sample.state == CognitiveState::NoHint &&
                kCounter.count("I don't need deep thinking.") > original) {
                continue;  // directive longer than the trace: bound does not apply
            }
            CHECK(sample.think_tokens <= original);
            if (sample.state == CognitiveState::FullHint) CHECK(sample.think_tokens == original);
            if (sample.state == CognitiveState::SparseHint) CHECK(sample.think_tokens < original);
        }
    }
}

TEST_CASE("id and episode-count mismatches are rejected") {
    probe::Problem problem{"p", "Q?", "1", ""};
    const segment::ReasoningTrace trace =
        segment::parse_trace("p", "<think>x. Wait, y.</think>A $\\boxed{1}$.");
    CHECK_THROWS_AS(
        build::build_response(problem, trace, make_hint("other", 0, 2), BuilderConfig{}, kCounter),
        Error);
    CHECK_THROWS_AS(
        build::build_response(problem, trace, make_hint("p", 0, 5), BuilderConfig{}, kCounter),
        Error);
}

TEST_CASE("answer source selection and the empty-answer error") {
    const segment::ReasoningTrace with_trace_answer =
        segment::parse_trace("p", "<think>x.</think>Trace prose answer $\\boxed{9}$.");
    segment::ReasoningTrace no_answer = with_trace_answer;
    no_answer.answer_text.clear();

    probe::Problem problem{"p", "Q?", "9", ""};
    BuilderConfig cfg;

    // default: the trace's own answer section
    TrainingSample s = build::build_response(problem, with_trace_answer, make_hint("p", 1, 1), cfg, kCounter);
    CHECK(s.response.ends_with("Trace prose answer $\\boxed{9}$."));

    // empty trace answer falls back to the boxed gold sentence
    s = build::build_response(problem, no_answer, make_hint("p", 1, 1), cfg, kCounter);
    CHECK(s.response.ends_with("The answer is $\\boxed{9}$."));

    // explicit gold_boxed policy
    cfg.answer_source = BuilderConfig::AnswerSource::gold_boxed;
    s = build::build_response(problem, with_trace_answer, make_hint("p", 1, 1), cfg, kCounter);
    CHECK(s.response.ends_with("The answer is $\\boxed{9}$."));

    // nothing available anywhere
    probe::Problem no_gold{"p", "Q?", "", ""};
    CHECK_THROWS_AS(build::build_response(no_gold, no_answer, make_hint("p", 1, 1), cfg, kCounter),
                    Error);
}

TEST_CASE("custom p0 text and delimiters are honored") {
    probe::Problem problem{"p", "Q?", "1", ""};
    const segment::ReasoningTrace trace =
        segment::parse_trace("p", "<think>long reasoning here.</think>A $\\boxed{1}$.");
    BuilderConfig cfg;
    cfg.p0_text = "Direct answer.";
    const TrainingSample s = build::build_response(problem, trace, make_hint("p", 0, 1), cfg, kCounter);
    CHECK(s.response.starts_with("<think>\nDirect answer.\n</think>\n"));

    BuilderConfig bad;
    bad.p0_text = "";
    CHECK_THROWS_AS(build::build_response(problem, trace, make_hint("p", 0, 1), bad, kCounter), Error);
}

TEST_CASE("partition splits by state and preserves order") {
    auto sample_with = [](const std::string& id, CognitiveState st) {
        TrainingSample s;
        s.problem_id = id;
        s.state = st;
        return s;
    };
    const std::vector<TrainingSample> mixed = {
        sample_with("a", CognitiveState::NoHint),    sample_with("b", CognitiveState::FullHint),
        sample_with("c", CognitiveState::SparseHint), sample_with("d", CognitiveState::NoHint),
        sample_with("e", CognitiveState::FullHint),  sample_with("f", CognitiveState::FullHint)};

    const build::Partition parts = build::partition(mixed);
    CHECK(parts.no_hint.size() == 2);
    CHECK(parts.sparse_hint.size() == 1);
    CHECK(parts.full_hint.size() == 3);
    CHECK(parts.no_hint[0].problem_id == "a");
    CHECK(parts.no_hint[1].problem_id == "d");
    CHECK(parts.full_hint[2].problem_id == "f");

    const build::Partition all_full = build::partition(
        {sample_with("x", CognitiveState::FullHint), sample_with("y", CognitiveState::FullHint)});
    CHECK(all_full.no_hint.empty());
    CHECK(all_full.sparse_hint.empty());
    CHECK(all_full.full_hint.size() == 2);

    const build::Partition empty = build::partition({});
    CHECK(empty.no_hint.empty());
    CHECK(empty.sparse_hint.empty());
    CHECK(empty.full_hint.empty());
}

TEST_CASE("dataset writes are deterministic and manifest counts match") {
    TempDir dir("dataset");
    probe::Problem problem{"p", "Q?", "5", ""};
    const segment::ReasoningTrace trace =
        segment::parse_trace("p", "<think>x. Wait, y. Hmm, z.</think>A $\\boxed{5}$.");

    std::vector<TrainingSample> samples;
    for (std::size_t k = 0; k <= 3; ++k) {
        TrainingSample s =
            build::build_response(problem, trace, make_hint("p", k, 3), BuilderConfig{}, kCounter);
        s.problem_id = "p" + std::to_string(k);
        samples.push_back(std::move(s));
    }

    const auto dataset1 = dir / "d1.jsonl";
    const auto manifest1 = dir / "m1.json";
    const build::Manifest m1 = build::write_dataset(samples, dataset1, manifest1, BuilderConfig{});

    const auto dataset2 = dir / "d2.jsonl";
    const auto manifest2 = dir / "m2.json";
    build::write_dataset(samples, dataset2, manifest2, BuilderConfig{});

    CHECK(testutil::file_digest(dataset1) == testutil::file_digest(dataset2));
    CHECK(testutil::file_digest(manifest1) == testutil::file_digest(manifest2));

    const build::Partition parts = build::partition(samples);
    CHECK(m1.no_hint == parts.no_hint.size());
    CHECK(m1.sparse_hint == parts.sparse_hint.size());
    CHECK(m1.full_hint == parts.full_hint.size());
    CHECK(!m1.config_hash.empty());

    // the jsonl lines parse back into equal samples
    const auto records = jsonl::read_file(dataset1);
    REQUIRE(records.size() == samples.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const TrainingSample back = TrainingSample::from_json(records[i]);
        CHECK(back.problem_id == samples[i].problem_id);
        CHECK(back.response == samples[i].response);
        CHECK(back.state == samples[i].state);
        CHECK(back.think_tokens == samples[i].think_tokens);
    }
}

TEST_CASE("config hash tracks builder settings") {
    BuilderConfig a;
    BuilderConfig b;
    CHECK(a.config_hash() == b.config_hash());
    b.p0_text = "Direct answer.";
    CHECK(a.config_hash() != b.config_hash());
}
