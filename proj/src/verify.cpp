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

#include "hintforge/verify.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>

#include "hintforge/error.hpp"
#include "hintforge/gateway.hpp"
#include "hintforge/prompts.hpp"

namespace hintforge::verify {

const char* method_name(Method m) {
    switch (m) {
        case Method::exact: return "exact";
        case Method::numeric: return "numeric";
        case Method::judge: return "judge";
    }
    return "exact";
}

nlohmann::json Verdict::to_json() const {
    nlohmann::json j{{"correct", correct}, {"method", method_name(method)}};
    j["extracted"] = extracted ? nlohmann::json(*extracted) : nlohmann::json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// Boxed-answer extraction
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kBoxed = "\\boxed{";

// Braces preceded by an odd number of backslashes are literals.
bool escaped(std::string_view text, std::size_t pos) {
    std::size_t backslashes = 0;
    while (pos > 0 && text[pos - 1] == '\\') {
        ++backslashes;
        --pos;
    }
    return backslashes % 2 == 1;
}

std::optional<std::string> balanced_group(std::string_view text, std::size_t open_brace) {
    int depth = 0;
    for (std::size_t i = open_brace; i < text.size(); ++i) {
        if (escaped(text, i)) continue;
        if (text[i] == '{') ++depth;
        if (text[i] == '}') {
            --depth;
            if (depth == 0) {
                return std::string(text.substr(open_brace + 1, i - open_brace - 1));
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::string extract_boxed(std::string_view text) {
    std::size_t search_end = text.size();
    while (true) {
        const std::size_t pos = text.rfind(kBoxed, search_end == 0 ? 0 : search_end - 1);
        if (pos == std::string_view::npos) break;
        if (auto content = balanced_group(text, pos + kBoxed.size() - 1)) {
            return *content;
        }
        if (pos == 0) break;
        search_end = pos;
    }
    throw Error(Err::NoBoxedAnswer, "no balanced \\boxed{...} in text");
}

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

namespace {

inline bool is_trailing_punct(char c) {
    return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?';
}

void trim(std::string& s) {
    std::size_t b = 0;
    while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    std::size_t e = s.size();
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    s = s.substr(b, e - b);
}

// \left and \right are stripped only before a delimiter, never inside a
// longer command name (\leftarrow stays intact)
std::string strip_left_right(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        for (std::string_view tok : {std::string_view("\\left"), std::string_view("\\right")}) {
            if (s.compare(i, tok.size(), tok) == 0) {
                const std::size_t after = i + tok.size();
                if (after >= s.size() || !std::isalpha(static_cast<unsigned char>(s[after]))) {
                    i = after;
                }
                break;
            }
        }
        if (i < s.size()) {
            out += s[i];
            ++i;
        }
    }
    return out;
}

}  // namespace

std::string normalize_answer(std::string_view input) {
    std::string s(input);

    // peel layers of whitespace, trailing punctuation, and $ wrappers
    while (true) {
        const std::string before = s;
        trim(s);
        while (!s.empty() && is_trailing_punct(s.back())) s.pop_back();
        while (s.size() >= 2 && s.front() == '$' && s.back() == '$') {
            s = s.substr(1, s.size() - 2);
        }
        if (s == before) break;
    }

    std::string collapsed;
    collapsed.reserve(s.size());
    bool prev_space = false;
    for (char c : s) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (space && prev_space) continue;
        collapsed += space ? ' ' : c;
        prev_space = space;
    }

    collapsed = strip_left_right(collapsed);

    // lowercase plain words; single letters and LaTeX command names keep case
    std::string out;
    out.reserve(collapsed.size());
    std::size_t i = 0;
    while (i < collapsed.size()) {
        if (std::isalpha(static_cast<unsigned char>(collapsed[i])) &&
            (i == 0 || collapsed[i - 1] != '\\')) {
            std::size_t j = i;
            while (j < collapsed.size() && std::isalpha(static_cast<unsigned char>(collapsed[j]))) {
                ++j;
            }
            if (j - i >= 2) {
                for (std::size_t p = i; p < j; ++p) {
                    out += static_cast<char>(std::tolower(static_cast<unsigned char>(collapsed[p])));
                }
            } else {
                out += collapsed[i];
            }
            i = j;
        } else {
            out += collapsed[i];
            ++i;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Numeric comparison
// ---------------------------------------------------------------------------

namespace {

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
};

struct ParsedNumber {
    bool exact = false;  // integer or simple fraction
    Rational rational;
    long double value = 0.0L;
};

bool parse_int64(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    std::size_t i = 0;
    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        i = 1;
    }
    if (i == s.size()) return false;
    std::int64_t value = 0;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        const int digit = s[i] - '0';
        if (value > (INT64_MAX - digit) / 10) return false;  // overflow: punt to decimal path
        value = value * 10 + digit;
    }
    out = negative ? -value : value;
    return true;
}

bool parse_decimal(std::string_view s, long double& out) {
    if (s.empty()) return false;
    std::string buf(s);
    char* end = nullptr;
    errno = 0;
    const long double v = std::strtold(buf.c_str(), &end);
    if (errno != 0 || end != buf.c_str() + buf.size()) return false;
    out = v;
    return true;
}

// Accepts integers, a/b, \frac{a}{b} (and \dfrac), and plain decimals.
std::optional<ParsedNumber> parse_number(std::string_view s) {
    ParsedNumber parsed;

    std::int64_t int_value = 0;
    if (parse_int64(s, int_value)) {
        parsed.exact = true;
        parsed.rational = {int_value, 1};
        parsed.value = static_cast<long double>(int_value);
        return parsed;
    }

    auto try_fraction = [&](std::string_view num_s, std::string_view den_s) -> bool {
        std::int64_t num = 0;
        std::int64_t den = 0;
        if (!parse_int64(num_s, num) || !parse_int64(den_s, den) || den == 0) return false;
        parsed.exact = true;
        parsed.rational = {num, den};
        parsed.value = static_cast<long double>(num) / static_cast<long double>(den);
        return true;
    };

    const std::size_t slash = s.find('/');
    if (slash != std::string_view::npos && slash != 0 && slash + 1 < s.size() &&
        try_fraction(s.substr(0, slash), s.substr(slash + 1))) {
        return parsed;
    }

    for (std::string_view frac : {std::string_view("\\frac{"), std::string_view("\\dfrac{")}) {
        if (s.substr(0, frac.size()) == frac && s.back() == '}') {
            const std::size_t mid = s.find("}{", frac.size());
            if (mid != std::string_view::npos &&
                try_fraction(s.substr(frac.size(), mid - frac.size()),
                             s.substr(mid + 2, s.size() - mid - 3))) {
                return parsed;
            }
        }
    }

    long double value = 0.0L;
    if (parse_decimal(s, value)) {
        parsed.exact = false;
        parsed.value = value;
        return parsed;
    }
    return std::nullopt;
}

bool numbers_equal(const ParsedNumber& a, const ParsedNumber& b, double rel_tol) {
    if (a.exact && b.exact) {
        const __int128 lhs = static_cast<__int128>(a.rational.num) * b.rational.den;
        const __int128 rhs = static_cast<__int128>(b.rational.num) * a.rational.den;
        return lhs == rhs;
    }
    const long double x = a.value;
    const long double y = b.value;
    if (x == y) return true;
    const long double scale = std::max(std::fabs(x), std::fabs(y));
    return std::fabs(x - y) <= static_cast<long double>(rel_tol) * scale;
}

}  // namespace

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

Verdict verify(std::string_view pred, std::string_view gold, const VerifyPolicy& policy) {
    if (gold.empty()) throw Error(Err::ConfigError, "gold answer must be non-empty");

    std::string candidate;
    try {
        candidate = extract_boxed(pred);
    } catch (const Error& e) {
        if (e.code() != Err::NoBoxedAnswer) throw;
        candidate.assign(pred);
    }

    const std::string npred = normalize_answer(candidate);
    const std::string ngold = normalize_answer(gold);

    Verdict verdict;
    verdict.extracted = npred;

    if (npred == ngold) {
        verdict.correct = true;
        verdict.method = Method::exact;
        return verdict;
    }

    if (policy.numeric) {
        const auto a = parse_number(npred);
        const auto b = parse_number(ngold);
        if (a && b) {
            verdict.correct = numbers_equal(*a, *b, policy.relative_tolerance);
            verdict.method = Method::numeric;
            return verdict;
        }
    }

    verdict.correct = false;
    verdict.method = Method::exact;
    return verdict;
}

Verdict judge_verify(std::string_view problem, std::string_view attempt,
                     std::string_view solution, gateway::Backend& client,
                     const std::string& model_name, const gateway::SamplingParams& params) {
    gateway::SamplingParams judge_params = params;
    judge_params.n_samples = 1;
    gateway::ChatRequest request = gateway::ChatRequest::single_user(
        model_name, prompts::render_grading(problem, attempt, solution), judge_params);
    const std::vector<std::string> replies = client.complete(request);
    const std::string& reply = replies.front();

    // verdict is the last non-empty line, exactly "Yes" or "No"
    std::string last_line;
    std::size_t end = reply.size();
    while (end > 0) {
        std::size_t begin = reply.rfind('\n', end - 1);
        begin = (begin == std::string::npos) ? 0 : begin + 1;
        std::string line = reply.substr(begin, end - begin);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) {
            last_line = line;
            break;
        }
        if (begin == 0) break;
        end = begin - 1;
    }

    Verdict verdict;
    verdict.method = Method::judge;
    verdict.judge_rationale = reply;
    if (last_line == "Yes") {
        verdict.correct = true;
    } else if (last_line == "No") {
        verdict.correct = false;
    } else {
        throw Error(Err::JudgeMalformedReply,
                    "judge reply does not end with Yes or No: \"" + last_line + "\"");
    }
    return verdict;
}

Verdict verify_with_judge(std::string_view problem, std::string_view pred, std::string_view gold,
                          const VerifyPolicy& policy, gateway::Backend* judge_client,
                          const std::string& judge_model,
                          const gateway::SamplingParams& judge_params) {
    Verdict verdict = verify(pred, gold, policy);
    if (verdict.correct || !policy.judge) return verdict;
    if (verdict.method == Method::numeric) return verdict;  // both parsed: numbers settle it
    if (judge_client == nullptr) {
        throw Error(Err::JudgeUnavailable, "policy enables judge but no judge client configured");
    }
    return judge_verify(problem, pred, gold, *judge_client, judge_model, judge_params);
}

void Verifier::set_judge(gateway::Backend* client, std::string model) {
    judge_client_ = client;
    judge_model_ = std::move(model);
}

Verdict Verifier::check(std::string_view problem, std::string_view pred,
                        std::string_view gold) const {
    return verify_with_judge(problem, pred, gold, policy_, judge_client_, judge_model_,
                             gateway::SamplingParams{});
}

}  // namespace hintforge::verify
