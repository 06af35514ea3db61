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

#include "hintforge/prompts.hpp"

namespace hintforge::prompts {

namespace {

constexpr std::string_view kGradingTemplate =
    "You are an AI assistant for grading a science problem. The user will provide you with the "
    "question itself, an attempt made by a student and the correct answer to the problem. Your "
    "job is to judge whether the attempt is correct by comparing it with the correct answer. If "
    "the expected solution concludes with a number or choice, there should be no ambiguity. If "
    "the expected solution involves going through the entire reasoning process, you should judge "
    "the attempt based on whether the reasoning process is correct with correct answer if "
    "helpful.\n"
    "\n"
    "The user will provide the attempt and the correct answer in the following format:\n"
    "\n"
    "# Problem\n"
    "{problem}\n"
    "\n"
    "## Attempt\n"
    "{attempt}\n"
    "\n"
    "## Correct answer\n"
    "{solution}\n"
    "\n"
    "Explain your reasoning, and end your response on a new line with only \"Yes\" or \"No\" "
    "(without quotes).";

constexpr std::string_view kBudgetTemplate =
    "{problem}\n"
    "\n"
    "Solve this problem concisely in approximately {budget} tokens.\n"
    "Show your reasoning with only the essential steps needed.\n"
    "Put your final answer within \\boxed{}.";

constexpr std::string_view kStandardTemplate =
    "{problem}\n"
    "Please reason step by step, and put your final answer within \\boxed{}.";

struct Substitution {
    std::string_view placeholder;
    std::string_view value;
};

// Single left-to-right pass over the template; substituted values are never
// re-scanned, so content containing "{...}" cannot inject further expansions.
std::string render(std::string_view tmpl, std::initializer_list<Substitution> subs) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        bool matched = false;
        if (tmpl[i] == '{') {
            for (const Substitution& sub : subs) {
                if (tmpl.substr(i, sub.placeholder.size()) == sub.placeholder) {
                    out += sub.value;
                    i += sub.placeholder.size();
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) {
            out += tmpl[i];
            ++i;
        }
    }
    return out;
}

}  // namespace

std::string_view grading_template() { return kGradingTemplate; }
std::string_view budget_template() { return kBudgetTemplate; }
std::string_view standard_template() { return kStandardTemplate; }

std::string render_standard(std::string_view problem) {
    std::string out(problem);
    out += '\n';
    out += kDirective;
    return out;
}

std::string render_budget(std::string_view problem, std::uint64_t budget_tokens) {
    const std::string budget = std::to_string(budget_tokens);
    return render(kBudgetTemplate, {{"{problem}", problem}, {"{budget}", budget}});
}

std::string render_probe(std::string_view problem, std::string_view hint) {
    if (hint.empty()) return render_standard(problem);
    std::string out(problem);
    out += "\nHere is a partial reasoning hint:\n";
    out += hint;
    out += '\n';
    out += kDirective;
    return out;
}

std::string render_grading(std::string_view problem, std::string_view attempt,
                           std::string_view solution) {
    return render(kGradingTemplate,
                  {{"{problem}", problem}, {"{attempt}", attempt}, {"{solution}", solution}});
}

}  // namespace hintforge::prompts
