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

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace hintforge::gateway {
class Backend;
struct SamplingParams;
}  // namespace hintforge::gateway

namespace hintforge::verify {

enum class Method { exact, numeric, judge };

const char* method_name(Method m);

struct Verdict {
    bool correct = false;
    Method method = Method::exact;
    std::optional<std::string> extracted;        // normalized answer; absent for judge verdicts
    std::optional<std::string> judge_rationale;  // full judge reply

    nlohmann::json to_json() const;
};

struct VerifyPolicy {
    bool numeric = true;
    bool judge = false;  // judge fallback for answers the string/number layers cannot settle
    double relative_tolerance = 1e-9;
};

/// Contents of the last balanced \boxed{...}; nested braces are preserved
/// verbatim, escaped braces do not close the group. Throws NoBoxedAnswer.
std::string extract_boxed(std::string_view text);

/// Deterministic canonical form: trim, drop surrounding $, collapse internal
/// whitespace, strip \left / \right, drop trailing punctuation, lowercase
/// plain words (runs of letters of length >= 2 not opening a LaTeX command).
std::string normalize_answer(std::string_view s);

/// String/number layers only. pred may be a full completion (its last boxed
/// answer is used) or a bare answer. Never consults a judge.
Verdict verify(std::string_view pred, std::string_view gold,
               const VerifyPolicy& policy = VerifyPolicy{});

/// Sends the grading prompt with {problem}/{attempt}/{solution} substituted
/// and parses the final non-empty line, which must be exactly "Yes" or "No".
Verdict judge_verify(std::string_view problem, std::string_view attempt,
                     std::string_view solution, gateway::Backend& client,
                     const std::string& model_name,
                     const gateway::SamplingParams& params);

/// verify() with judge fallback when the policy enables it. Throws
/// JudgeUnavailable if the policy asks for a judge and none is configured.
Verdict verify_with_judge(std::string_view problem, std::string_view pred, std::string_view gold,
                          const VerifyPolicy& policy, gateway::Backend* judge_client,
                          const std::string& judge_model,
                          const gateway::SamplingParams& judge_params);

/// Policy plus (optional) judge wiring, shared by the probing and evaluation
/// drivers. Safe for concurrent use when the judge backend is.
class Verifier {
public:
    Verifier() = default;
    explicit Verifier(VerifyPolicy policy) : policy_(policy) {}

    void set_judge(gateway::Backend* client, std::string model);
    const VerifyPolicy& policy() const { return policy_; }

    Verdict check(std::string_view problem, std::string_view pred, std::string_view gold) const;

private:
    VerifyPolicy policy_;
    gateway::Backend* judge_client_ = nullptr;
    std::string judge_model_;
};

}  // namespace hintforge::verify
