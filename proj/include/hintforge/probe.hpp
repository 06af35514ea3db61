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

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hintforge/error.hpp"
#include "hintforge/gateway.hpp"
#include "hintforge/segment.hpp"
#include "hintforge/verify.hpp"

namespace hintforge::probe {

struct Problem {
    std::string id;
    std::string question;
    std::string answer;  // gold
    std::string source;

    static Problem from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Three-way difficulty label derived from the minimum effective hint: no
/// hint needed, a proper episode prefix suffices, or the full trace is kept.
enum class CognitiveState { NoHint, SparseHint, FullHint };

const char* state_name(CognitiveState s);  // "no_hint" / "sparse_hint" / "full_hint"
CognitiveState state_from_name(std::string_view name);

struct ProbeConfig {
    std::size_t max_k = 25;
    std::uint32_t attempts_per_k = 1;
    std::uint32_t success_threshold = 1;  // successes needed among attempts_per_k
    gateway::SamplingParams probe_params;  // temperature 0, single sample by default
    std::string prompt_template = "probe-v1";
    std::string model_name = "instruct";

    void validate() const;
};

struct ProbeLogEntry {
    std::size_t k = 0;
    std::uint32_t attempts = 0;
    std::uint32_t successes = 0;
};

struct MinEffectiveHint {
    std::string problem_id;
    std::size_t k_star = 0;
    std::size_t n_episodes = 0;
    CognitiveState state = CognitiveState::NoHint;
    std::vector<ProbeLogEntry> probe_log;  // k strictly increasing from 0
    std::uint64_t probes_used = 0;         // total attempts issued

    nlohmann::json to_json() const;
    static MinEffectiveHint from_json(const nlohmann::json& j);
};

struct SweepRecord {
    std::string problem_id;
    std::vector<bool> success_by_k;  // index k in 0..N
    bool continuous = false;         // success at every k >= first_success
    std::optional<std::size_t> first_success;

    nlohmann::json to_json() const;
    static SweepRecord from_json(const nlohmann::json& j);
};

/// Shared attempt counter for a whole run; charge() throws
/// ProbeBudgetExceeded once the cap is hit.
class ProbeBudget {
public:
    explicit ProbeBudget(std::optional<std::uint64_t> cap = std::nullopt) : cap_(cap) {}

    void charge(std::uint64_t attempts);
    std::uint64_t used() const { return used_.load(); }

private:
    std::optional<std::uint64_t> cap_;
    std::atomic<std::uint64_t> used_{0};
};

/// Thrown when the global probe budget runs out mid-search; carries the
/// partial per-k log accumulated so far.
class ProbeBudgetError : public Error {
public:
    ProbeBudgetError(std::string message, std::vector<ProbeLogEntry> partial_log,
                     std::uint64_t probes_used)
        : Error(Err::ProbeBudgetExceeded, std::move(message)),
          partial_log_(std::move(partial_log)),
          probes_used_(probes_used) {}

    const std::vector<ProbeLogEntry>& partial_log() const { return partial_log_; }
    std::uint64_t probes_used() const { return probes_used_; }

private:
    std::vector<ProbeLogEntry> partial_log_;
    std::uint64_t probes_used_;
};

/// One probe: prompt with the first k episodes, attempts_per_k completions,
/// each verified against the gold answer.
ProbeLogEntry probe_at_k(const Problem& problem, const std::vector<segment::Episode>& episodes,
                         std::size_t k, gateway::Backend& backend,
                         const verify::Verifier& verifier, const ProbeConfig& config);

/// Linear search k = 0, 1, 2, ... with early stopping at the first k whose
/// successes reach the threshold; capped at min(N, max_k). No success within
/// the cap falls back to k_star = N (full deliberation).
MinEffectiveHint find_k_star(const Problem& problem,
                             const std::vector<segment::Episode>& episodes,
                             gateway::Backend& backend, const verify::Verifier& verifier,
                             const ProbeConfig& config, ProbeBudget* budget = nullptr);

/// Probes every k in 0..N with no early stopping, for success-vs-k analysis.
SweepRecord sweep(const Problem& problem, const std::vector<segment::Episode>& episodes,
                  gateway::Backend& backend, const verify::Verifier& verifier,
                  const ProbeConfig& config, ProbeBudget* budget = nullptr);

/// NoHint iff k_star = 0 (including the degenerate N = 0 trace), FullHint iff
/// k_star = N, SparseHint otherwise. Throws InvalidKStar when k_star > N.
CognitiveState assign_state(std::size_t k_star, std::size_t n_episodes);

/// Runs find_k_star over a corpus with up to `workers` problems in flight;
/// within one problem the k-scan stays sequential. Results are returned
/// sorted by problem_id; on_record fires as each problem completes.
std::vector<MinEffectiveHint> probe_corpus(
    const std::vector<Problem>& problems,
    const std::vector<std::vector<segment::Episode>>& episodes_per_problem,
    gateway::Backend& backend, const verify::Verifier& verifier, const ProbeConfig& config,
    std::size_t workers, ProbeBudget* budget = nullptr,
    const std::function<void(const MinEffectiveHint&)>& on_record = {});

/// Same driver for sweeps.
std::vector<SweepRecord> sweep_corpus(
    const std::vector<Problem>& problems,
    const std::vector<std::vector<segment::Episode>>& episodes_per_problem,
    gateway::Backend& backend, const verify::Verifier& verifier, const ProbeConfig& config,
    std::size_t workers, ProbeBudget* budget = nullptr,
    const std::function<void(const SweepRecord&)>& on_record = {});

}  // namespace hintforge::probe
