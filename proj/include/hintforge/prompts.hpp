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
#include <string>
#include <string_view>

// Prompt templates are embedded here and mirrored as golden files under
// prompts/ at the repository root; the test suite keeps the two in sync
// byte-for-byte. Any wording change must touch both.

namespace hintforge::prompts {

inline constexpr std::string_view kDirective =
    "Please reason step by step, and put your final answer within \\boxed{}.";

/// Raw template text (with {placeholders}), identical to prompts/grading.txt.
std::string_view grading_template();

/// Raw template text, identical to prompts/budget.txt except that the file
/// pins the default budget of 8000 where this template has {budget}.
std::string_view budget_template();

/// Raw template text, identical to prompts/eval_standard.txt.
std::string_view standard_template();

/// problem + "\n" + directive.
std::string render_standard(std::string_view problem);

/// Budget-forcing prompt with the token budget substituted.
std::string render_budget(std::string_view problem, std::uint64_t budget_tokens);

/// Probe prompt, template "probe-v1": the standard prompt for an empty hint,
/// otherwise the hint block is inserted between problem and directive.
std::string render_probe(std::string_view problem, std::string_view hint);

/// Grading prompt with {problem}/{attempt}/{solution} substituted.
std::string render_grading(std::string_view problem, std::string_view attempt,
                           std::string_view solution);

/// Identifier of the probe template wording, recorded in probe configs.
inline constexpr std::string_view kProbeTemplateId = "probe-v1";

}  // namespace hintforge::prompts
