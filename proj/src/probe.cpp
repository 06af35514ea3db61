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

#include "hintforge/probe.hpp"

#include <algorithm>
#include <mutex>
#include <thread>

#include "hintforge/prompts.hpp"

namespace hintforge::probe {

Problem Problem::from_json(const nlohmann::json& j) {
    Problem p;
    p.id = j.at("problem_id").get<std::string>();
    p.question = j.at("question").get<std::string>();
    p.answer = j.at("answer").get<std::string>();
    p.source = j.value("source", "");
    return p;
}

nlohmann::json Problem::to_json() const {
    return {{"problem_id", id}, {"question", question}, {"answer", answer}, {"source", source}};
}

const char* state_name(CognitiveState s) {
    switch (s) {
        case CognitiveState::NoHint: return "no_hint";
        case CognitiveState::SparseHint: return "sparse_hint";
        case CognitiveState::FullHint: return "full_hint";
    }
    return "no_hint";
}

CognitiveState state_from_name(std::string_view name) {
    if (name == "no_hint") return CognitiveState::NoHint;
    if (name == "sparse_hint") return CognitiveState::SparseHint;
    if (name == "full_hint") return CognitiveState::FullHint;
    throw Error(Err::ConfigError, "unknown cognitive state: " + std::string(name));
}

void ProbeConfig::validate() const {
    if (attempts_per_k < 1) throw Error(Err::ConfigError, "attempts_per_k must be >= 1");
    if (success_threshold < 1 || success_threshold > attempts_per_k) {
        throw Error(Err::ConfigError, "success_threshold must be in [1, attempts_per_k]");
    }
    probe_params.validate();
}

nlohmann::json MinEffectiveHint::to_json() const {
    nlohmann::json log = nlohmann::json::array();
    for (const ProbeLogEntry& e : probe_log) {
        log.push_back({{"k", e.k}, {"attempts", e.attempts}, {"successes", e.successes}});
    }
    return {{"problem_id", problem_id}, {"k_star", k_star},   {"n_episodes", n_episodes},
            {"state", state_name(state)}, {"probes_used", probes_used}, {"probe_log", log}};
}

MinEffectiveHint MinEffectiveHint::from_json(const nlohmann::json& j) {
    MinEffectiveHint h;
    h.problem_id = j.at("problem_id").get<std::string>();
    h.k_star = j.at("k_star").get<std::size_t>();
    h.n_episodes = j.at("n_episodes").get<std::size_t>();
    h.state = state_from_name(j.at("state").get<std::string>());
    h.probes_used = j.at("probes_used").get<std::uint64_t>();
    for (const nlohmann::json& e : j.at("probe_log")) {
        h.probe_log.push_back({e.at("k").get<std::size_t>(), e.at("attempts").get<std::uint32_t>(),
                               e.at("successes").get<std::uint32_t>()});
    }
    return h;
}

nlohmann::json SweepRecord::to_json() const {
    nlohmann::json j{{"problem_id", problem_id},
                     {"success_by_k", success_by_k},
                     {"continuous", continuous}};
    j["first_success"] =
        first_success ? nlohmann::json(*first_success) : nlohmann::json(nullptr);
    return j;
}

SweepRecord SweepRecord::from_json(const nlohmann::json& j) {
    SweepRecord r;
    r.problem_id = j.at("problem_id").get<std::string>();
    r.success_by_k = j.at("success_by_k").get<std::vector<bool>>();
    r.continuous = j.at("continuous").get<bool>();
    if (j.contains("first_success") && !j["first_success"].is_null()) {
        r.first_success = j["first_success"].get<std::size_t>();
    }
    return r;
}

void ProbeBudget::charge(std::uint64_t attempts) {
    if (!cap_) {
        used_.fetch_add(attempts);
        return;
    }
    std::uint64_t current = used_.load();
    do {
        if (current + attempts > *cap_) {
            throw Error(Err::ProbeBudgetExceeded,
                        "probe budget of " + std::to_string(*cap_) + " attempts exhausted");
        }
    } while (!used_.compare_exchange_weak(current, current + attempts));
}

CognitiveState assign_state(std::size_t k_star, std::size_t n_episodes) {
    if (k_star > n_episodes) {
        throw Error(Err::InvalidKStar, "k_star " + std::to_string(k_star) +
                                           " exceeds episode count " + std::to_string(n_episodes));
    }
    if (k_star == 0) return CognitiveState::NoHint;  // covers the degenerate N = 0 trace
    if (k_star == n_episodes) return CognitiveState::FullHint;
    return CognitiveState::SparseHint;
}

ProbeLogEntry probe_at_k(const Problem& problem, const std::vector<segment::Episode>& episodes,
                         std::size_t k, gateway::Backend& backend,
                         const verify::Verifier& verifier, const ProbeConfig& config) {
    const std::string hint = segment::join_prefix(episodes, k);
    const std::string prompt = prompts::render_probe(problem.question, hint);

    gateway::SamplingParams params = config.probe_params;
    params.n_samples = config.attempts_per_k;
    gateway::ChatRequest request =
        gateway::ChatRequest::single_user(config.model_name, prompt, params);

    const std::vector<std::string> replies = backend.complete(request);
    ProbeLogEntry entry;
    entry.k = k;
    entry.attempts = static_cast<std::uint32_t>(replies.size());
    for (const std::string& reply : replies) {
        if (verifier.check(problem.question, reply, problem.answer).correct) ++entry.successes;
    }
    return entry;
}

namespace {

void charge_budget(ProbeBudget* budget, const ProbeConfig& config,
                   const std::vector<ProbeLogEntry>& log, std::uint64_t used) {
    if (budget == nullptr) return;
    try {
        budget->charge(config.attempts_per_k);
    } catch (const Error& e) {
        if (e.code() != Err::ProbeBudgetExceeded) throw;
        throw ProbeBudgetError(e.what(), log, used);
    }
}

}  // namespace

MinEffectiveHint find_k_star(const Problem& problem,
                             const std::vector<segment::Episode>& episodes,
                             gateway::Backend& backend, const verify::Verifier& verifier,
                             const ProbeConfig& config, ProbeBudget* budget) {
    config.validate();
    MinEffectiveHint result;
    result.problem_id = problem.id;
    result.n_episodes = episodes.size();

    const std::size_t cap = std::min(episodes.size(), config.max_k);
    for (std::size_t k = 0; k <= cap; ++k) {
        charge_budget(budget, config, result.probe_log, result.probes_used);
        ProbeLogEntry entry = probe_at_k(problem, episodes, k, backend, verifier, config);
        result.probes_used += entry.attempts;
        result.probe_log.push_back(entry);
        if (entry.successes >= config.success_threshold) {
            result.k_star = k;
            result.state = assign_state(k, episodes.size());
            return result;
        }
    }
    result.k_star = episodes.size();  // no effective hint: full deliberation
    result.state = assign_state(result.k_star, episodes.size());
    return result;
}

SweepRecord sweep(const Problem& problem, const std::vector<segment::Episode>& episodes,
                  gateway::Backend& backend, const verify::Verifier& verifier,
                  const ProbeConfig& config, ProbeBudget* budget) {
    config.validate();
    SweepRecord record;
    record.problem_id = problem.id;
    record.success_by_k.resize(episodes.size() + 1, false);

    std::vector<ProbeLogEntry> log;
    std::uint64_t used = 0;
    for (std::size_t k = 0; k <= episodes.size(); ++k) {
        charge_budget(budget, config, log, used);
        ProbeLogEntry entry = probe_at_k(problem, episodes, k, backend, verifier, config);
        used += entry.attempts;
        log.push_back(entry);
        const bool success = entry.successes >= config.success_threshold;
        record.success_by_k[k] = success;
        if (success && !record.first_success) record.first_success = k;
    }

    if (record.first_success) {
        record.continuous = true;
        for (std::size_t k = *record.first_success; k < record.success_by_k.size(); ++k) {
            if (!record.success_by_k[k]) {
                record.continuous = false;
                break;
            }
        }
    }
    return record;
}

namespace {

/// Shared worker-pool driver: per-problem tasks, results collected by input
/// index, emitted in problem_id order.
template <typename Result, typename Fn>
std::vector<Result> run_pool(const std::vector<Problem>& problems, std::size_t workers, Fn&& fn,
                             const std::function<void(const Result&)>& on_record) {
    std::vector<std::optional<Result>> slots(problems.size());
    std::atomic<std::size_t> next{0};
    std::mutex record_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const std::size_t thread_count = std::max<std::size_t>(1, std::min(workers, problems.size()));
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= problems.size()) return;
                {
                    std::lock_guard lock(failure_mutex);
                    if (failure) return;
                }
                try {
                    Result r = fn(i);
                    if (on_record) {
                        std::lock_guard lock(record_mutex);
                        on_record(r);
                    }
                    slots[i] = std::move(r);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    std::vector<Result> results;
    results.reserve(problems.size());
    for (std::optional<Result>& slot : slots) {
        results.push_back(std::move(*slot));
    }
    std::sort(results.begin(), results.end(),
              [](const Result& a, const Result& b) { return a.problem_id < b.problem_id; });
    return results;
}

}  // namespace

std::vector<MinEffectiveHint> probe_corpus(
    const std::vector<Problem>& problems,
    const std::vector<std::vector<segment::Episode>>& episodes_per_problem,
    gateway::Backend& backend, const verify::Verifier& verifier, const ProbeConfig& config,
    std::size_t workers, ProbeBudget* budget,
    const std::function<void(const MinEffectiveHint&)>& on_record) {
    if (episodes_per_problem.size() != problems.size()) {
        throw Error(Err::EpisodeCountMismatch, "one episode list required per problem");
    }
    return run_pool<MinEffectiveHint>(
        problems, workers,
        [&](std::size_t i) {
            return find_k_star(problems[i], episodes_per_problem[i], backend, verifier, config,
                               budget);
        },
        on_record);
}

std::vector<SweepRecord> sweep_corpus(
    const std::vector<Problem>& problems,
    const std::vector<std::vector<segment::Episode>>& episodes_per_problem,
    gateway::Backend& backend, const verify::Verifier& verifier, const ProbeConfig& config,
    std::size_t workers, ProbeBudget* budget,
    const std::function<void(const SweepRecord&)>& on_record) {
    if (episodes_per_problem.size() != problems.size()) {
        throw Error(Err::EpisodeCountMismatch, "one episode list required per problem");
    }
    return run_pool<SweepRecord>(
        problems, workers,
        [&](std::size_t i) {
            return sweep(problems[i], episodes_per_problem[i], backend, verifier, config, budget);
        },
        on_record);
}

}  // namespace hintforge::probe
