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

#include "hintforge/eval.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "hintforge/error.hpp"
#include "hintforge/prompts.hpp"

namespace hintforge::eval {

void EvalConfig::validate() const {
    params.validate();
    if (prompt_style == PromptStyle::budget && budget_tokens == 0) {
        throw Error(Err::ConfigError, "budget_tokens must be positive for budget prompts");
    }
}

std::string render_prompt(std::string_view problem, const EvalConfig& config) {
    if (config.prompt_style == EvalConfig::PromptStyle::budget) {
        return prompts::render_budget(problem, config.budget_tokens);
    }
    return prompts::render_standard(problem);
}

TokenSplit split_tokens(std::string_view completion, const segment::ThinkDelimiters& delims,
                        const analytics::TokenCounter& counter) {
    TokenSplit split;
    split.total_tokens = counter.count(completion);

    const std::size_t open_pos = completion.find(delims.open);
    if (open_pos == std::string_view::npos) {
        split.answer_tokens = split.total_tokens;
        return split;
    }
    const std::size_t body_start = open_pos + delims.open.size();
    const std::size_t close_pos = completion.find(delims.close, body_start);
    if (close_pos == std::string_view::npos) {
        split.answer_tokens = split.total_tokens;
        return split;
    }

    split.think_tokens = counter.count(completion.substr(body_start, close_pos - body_start));
    split.answer_tokens = counter.count(completion.substr(0, open_pos)) +
                          counter.count(completion.substr(close_pos + delims.close.size()));
    return split;
}

nlohmann::json ProblemReport::to_json() const {
    nlohmann::json j{{"problem_id", problem_id},
                     {"accuracy", accuracy},
                     {"mean_think_tokens", mean_think_tokens},
                     {"mean_total_tokens", mean_total_tokens}};
    j["error"] = error ? nlohmann::json(*error) : nlohmann::json(nullptr);
    return j;
}

std::size_t EvalReport::failed_problems() const {
    std::size_t n = 0;
    for (const ProblemReport& p : problems) {
        if (p.error) ++n;
    }
    return n;
}

nlohmann::json EvalReport::to_json() const {
    nlohmann::json probs = nlohmann::json::array();
    for (const ProblemReport& p : problems) probs.push_back(p.to_json());
    return {{"corpus_accuracy", corpus_accuracy},
            {"corpus_mean_think_tokens", corpus_mean_think_tokens},
            {"corpus_mean_total_tokens", corpus_mean_total_tokens},
            {"problems", probs}};
}

std::vector<nlohmann::json> EvalReport::samples_jsonl() const {
    std::vector<nlohmann::json> records;
    for (const ProblemReport& p : problems) {
        for (const SampleOutcome& s : p.samples) {
            records.push_back({{"problem_id", p.problem_id},
                               {"sample_idx", s.sample_idx},
                               {"text", s.text},
                               {"correct", s.correct},
                               {"think_tokens", s.think_tokens}});
        }
    }
    return records;
}

namespace {

ProblemReport evaluate_problem(const probe::Problem& problem, gateway::Backend& backend,
                               const verify::Verifier& verifier, const EvalConfig& config) {
    ProblemReport report;
    report.problem_id = problem.id;

    gateway::ChatRequest request = gateway::ChatRequest::single_user(
        config.model_name, render_prompt(problem.question, config), config.params);

    std::vector<std::string> replies;
    try {
        replies = backend.complete(request);
    } catch (const Error& e) {
        report.error = std::string(err_name(e.code())) + ": " + e.what();
        return report;
    }

    std::size_t successes = 0;
    std::uint64_t think_total = 0;
    std::uint64_t total_total = 0;
    for (std::size_t i = 0; i < replies.size(); ++i) {
        const TokenSplit split = split_tokens(replies[i], config.delimiters, config.counter);
        const bool correct = verifier.check(problem.question, replies[i], problem.answer).correct;
        if (correct) ++successes;
        think_total += split.think_tokens;
        total_total += split.total_tokens;
        if (config.keep_samples) {
            report.samples.push_back({i, replies[i], correct, split.think_tokens,
                                      split.answer_tokens, split.total_tokens});
        }
    }

    const double n = static_cast<double>(config.params.n_samples);
    report.accuracy = static_cast<double>(successes) / n;
    report.mean_think_tokens = static_cast<double>(think_total) / n;
    report.mean_total_tokens = static_cast<double>(total_total) / n;
    return report;
}

}  // namespace

EvalReport evaluate(const std::vector<probe::Problem>& problems, gateway::Backend& backend,
                    const verify::Verifier& verifier, const EvalConfig& config,
                    std::size_t workers) {
    if (problems.empty()) throw Error(Err::EmptyInput, "no problems to evaluate");
    config.validate();

    std::vector<ProblemReport> reports(problems.size());
    std::atomic<std::size_t> next{0};
    const std::size_t thread_count = std::max<std::size_t>(1, std::min(workers, problems.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < thread_count; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= problems.size()) return;
                reports[i] = evaluate_problem(problems[i], backend, verifier, config);
            }
        });
    }
    for (std::thread& th : pool) th.join();

    std::sort(reports.begin(), reports.end(),
              [](const ProblemReport& a, const ProblemReport& b) {
                  return a.problem_id < b.problem_id;
              });

    EvalReport report;
    report.problems = std::move(reports);

    std::size_t ok = 0;
    double acc_sum = 0.0;
    double think_sum = 0.0;
    double total_sum = 0.0;
    for (const ProblemReport& p : report.problems) {
        if (p.error) continue;
        ++ok;
        acc_sum += p.accuracy;
        think_sum += p.mean_think_tokens;
        total_sum += p.mean_total_tokens;
    }
    if (ok > 0) {
        report.corpus_accuracy = acc_sum / static_cast<double>(ok);
        report.corpus_mean_think_tokens = think_sum / static_cast<double>(ok);
        report.corpus_mean_total_tokens = total_sum / static_cast<double>(ok);
    }
    return report;
}

}  // namespace hintforge::eval
