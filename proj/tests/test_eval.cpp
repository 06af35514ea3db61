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

#include <algorithm>

#include "hintforge/eval.hpp"
#include "hintforge/jsonl.hpp"
#include "hintforge/prompts.hpp"
#include "testutil.hpp"

using namespace hintforge;
using eval::EvalConfig;
using testutil::TempDir;

#ifndef HINTFORGE_REPO_DIR
#define HINTFORGE_REPO_DIR "."
#endif

namespace {

const std::filesystem::path kRepoDir = HINTFORGE_REPO_DIR;

std::string golden(const std::string& name) {
    return testutil::slurp(kRepoDir / "prompts" / name);
}

std::string substitute(std::string text, const std::string& placeholder, const std::string& value) {
    const std::size_t pos = text.find(placeholder);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, placeholder.size(), value);
}

}  // namespace

TEST_CASE("standard prompt matches the golden template") {
    EvalConfig config;
    const std::string question = "What is 6 x 7?";
    CHECK(eval::render_prompt(question, config) ==
          substitute(golden("eval_standard.txt"), "{problem}", question));
}

TEST_CASE("budget prompt matches the golden template at the default budget") {
    EvalConfig config;
    config.prompt_style = EvalConfig::PromptStyle::budget;
    config.budget_tokens = 8000;
    const std::string question = "What is 6 x 7?";
    CHECK(eval::render_prompt(question, config) ==
          substitute(golden("budget.txt"), "{problem}", question));
}

TEST_CASE("budget prompt substitutes other budgets") {
    EvalConfig config;
    config.prompt_style = EvalConfig::PromptStyle::budget;
    config.budget_tokens = 4000;
    const std::string rendered = eval::render_prompt("P", config);
    CHECK(rendered.find("approximately 4000 tokens") != std::string::npos);
    CHECK(rendered.find("8000") == std::string::npos);
}

TEST_CASE("grading template matches its golden file byte for byte") {
    CHECK(std::string(prompts::grading_template()) == golden("grading.txt"));
}

TEST_CASE("think token split respects the tag boundary") {
    analytics::TokenCounter ws;
    segment::ThinkDelimiters delims;

    const eval::TokenSplit split =
        eval::split_tokens("<think>\nalpha beta\n</think>\ngamma delta epsilon", delims, ws);
    CHECK(split.think_tokens == 2);
    CHECK(split.answer_tokens == 3);  // delimiter tokens belong to neither side
    CHECK(split.total_tokens == 7);
}

TEST_CASE("token split invariant: think + answer = total - delimiters") {
    analytics::TokenCounter ws;
    segment::ThinkDelimiters delims;
    const std::vector<std::string> completions = {
        "<think>\na b c\n</think>\nx y",
        "prefix words\n<think>\nbody only\n</think>\ntail",
        "<think>\n\n</think>\nanswer",
    };
    for (const std::string& text : completions) {
        const eval::TokenSplit split = eval::split_tokens(text, delims, ws);
        CHECK(split.think_tokens + split.answer_tokens == split.total_tokens - 2);
    }
}

TEST_CASE("missing think tags count everything as answer") {
    analytics::TokenCounter ws;
    segment::ThinkDelimiters delims;
    const eval::TokenSplit split = eval::split_tokens("no tags at all here", delims, ws);
    CHECK(split.think_tokens == 0);
    CHECK(split.answer_tokens == split.total_tokens);
    CHECK(split.total_tokens == 5);

    const eval::TokenSplit partial = eval::split_tokens("<think>never closed", delims, ws);
    CHECK(partial.think_tokens == 0);
    CHECK(partial.answer_tokens == partial.total_tokens);
}

TEST_CASE("sixteen-sample accuracy with a fixed denominator") {
    // cassette with 8 right / 8 wrong replies for one problem
    EvalConfig config;
    config.params.n_samples = 16;
    config.model_name = "replay-model";

    const probe::Problem problem{"p1", "How many sides has a hexagon?", "6", ""};
    const gateway::ChatRequest request = gateway::ChatRequest::single_user(
        config.model_name, eval::render_prompt(problem.question, config), config.params);

    std::vector<std::string> replies;
    for (int i = 0; i < 16; ++i) {
        replies.push_back(i % 2 == 0
                              ? "<think>\ncount the sides\n</think>\n" + testutil::boxed_reply("6")
                              : "<think>\nguessing\n</think>\n" + testutil::boxed_reply("5"));
    }
    gateway::Cassette cassette;
    cassette.insert(request.content_hash(), request.canonical_json(), replies);
    gateway::ReplayBackend backend(std::move(cassette));

    verify::Verifier verifier;
    const eval::EvalReport report = eval::evaluate({problem}, backend, verifier, config);
    REQUIRE(report.problems.size() == 1);
    CHECK(report.problems[0].accuracy == doctest::Approx(0.5));
    CHECK(report.corpus_accuracy == doctest::Approx(0.5));
    CHECK(report.problems[0].mean_think_tokens > 0.0);
}

TEST_CASE("corpus metrics are order invariant and all-correct reaches one") {
    EvalConfig config;
    config.params.n_samples = 4;
    verify::Verifier verifier;

    testutil::FakeBackend backend([](const std::string& prompt, std::size_t) {
        // answer depends only on the problem in the prompt
        return prompt.find("first") != std::string::npos ? testutil::boxed_reply("1")
                                                         : testutil::boxed_reply("2");
    });

    std::vector<probe::Problem> problems = {{"a", "the first question", "1", ""},
                                            {"b", "the second question", "2", ""}};
    const eval::EvalReport fwd = eval::evaluate(problems, backend, verifier, config);
    std::reverse(problems.begin(), problems.end());
    const eval::EvalReport rev = eval::evaluate(problems, backend, verifier, config);

    CHECK(fwd.corpus_accuracy == 1.0);
    CHECK(rev.corpus_accuracy == 1.0);
    REQUIRE(fwd.problems.size() == 2);
    CHECK(fwd.problems[0].problem_id == rev.problems[0].problem_id);
    CHECK(fwd.problems[0].accuracy == rev.problems[0].accuracy);
}

TEST_CASE("irrecoverable problems are marked, not fatal") {
    EvalConfig config;
    config.params.n_samples = 2;
    config.model_name = "replay-model";
    verify::Verifier verifier;

    const probe::Problem good{"good", "known question", "1", ""};
    const gateway::ChatRequest request = gateway::ChatRequest::single_user(
        config.model_name, eval::render_prompt(good.question, config), config.params);
    gateway::Cassette cassette;
    cassette.insert(request.content_hash(), {},
                    {testutil::boxed_reply("1"), testutil::boxed_reply("1")});
    gateway::ReplayBackend backend(std::move(cassette));

    const probe::Problem missing{"missing", "unknown question", "2", ""};
    const eval::EvalReport report = eval::evaluate({good, missing}, backend, verifier, config);

    REQUIRE(report.problems.size() == 2);
    CHECK(!report.problems[0].error.has_value());  // "good" sorts first
    CHECK(report.problems[0].accuracy == 1.0);
    REQUIRE(report.problems[1].error.has_value());
    CHECK(report.problems[1].error->find("ReplayMiss") != std::string::npos);
    CHECK(report.failed_problems() == 1);
    CHECK(report.corpus_accuracy == 1.0);  // aggregated over the problems that ran
}

TEST_CASE("per-sample dump records carry think token counts") {
    EvalConfig config;
    config.params.n_samples = 2;
    config.keep_samples = true;
    verify::Verifier verifier;
    testutil::FakeBackend backend([](const std::string&, std::size_t idx) {
        return "<think>\nsome thought\n</think>\n" + testutil::boxed_reply(std::to_string(idx));
    });

    const eval::EvalReport report =
        eval::evaluate({{"p", "q", "0", ""}}, backend, verifier, config);
    const auto records = report.samples_jsonl();
    REQUIRE(records.size() == 2);
    CHECK(records[0].at("problem_id") == "p");
    CHECK(records[0].at("sample_idx") == 0);
    CHECK(records[0].at("correct") == true);
    CHECK(records[1].at("correct") == false);
    CHECK(records[0].at("think_tokens") == 2);
}

TEST_CASE("eval report serializes corpus and per-problem fields") {
    EvalConfig config;
    config.params.n_samples = 1;
    verify::Verifier verifier;
    testutil::FakeBackend backend(
        [](const std::string&, std::size_t) { return testutil::boxed_reply("3"); });
    const eval::EvalReport report =
        eval::evaluate({{"p", "q", "3", ""}}, backend, verifier, config);
    const nlohmann::json j = report.to_json();
    CHECK(j.at("corpus_accuracy") == 1.0);
    CHECK(j.at("problems")[0].at("problem_id") == "p");
    CHECK(j.at("problems")[0].at("error").is_null());
}
