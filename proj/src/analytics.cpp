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

#include "hintforge/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hintforge/error.hpp"
#include "hintforge/textscan.hpp"

namespace hintforge::analytics {

std::uint64_t TokenCounter::count(std::string_view text) const {
    switch (mode) {
        case Mode::whitespace:
            return textscan::count_ws_tokens(text);
        case Mode::chars_div4:
            return (text.size() + 3) / 4;
        case Mode::external:
            if (!external) {
                throw Error(Err::ExternalCounterUnavailable,
                            "external token counter has no endpoint");
            }
            return external(text);
    }
    return 0;
}

TokenCounter::Mode TokenCounter::mode_from_name(std::string_view name) {
    if (name == "whitespace") return Mode::whitespace;
    if (name == "chars_div4") return Mode::chars_div4;
    if (name == "external") return Mode::external;
    throw Error(Err::ConfigError, "unknown token counter mode: " + std::string(name));
}

const char* TokenCounter::mode_name(Mode mode) {
    switch (mode) {
        case Mode::whitespace: return "whitespace";
        case Mode::chars_div4: return "chars_div4";
        case Mode::external: return "external";
    }
    return "whitespace";
}

namespace {

// lower median of an unsorted list
std::optional<std::uint64_t> lower_median(std::vector<std::uint64_t> values) {
    if (values.empty()) return std::nullopt;
    const std::size_t idx = (values.size() - 1) / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx),
                     values.end());
    return values[idx];
}

nlohmann::json opt_json(const std::optional<std::uint64_t>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json state_json(const StateStats& s) {
    return {{"count", s.count},
            {"proportion", s.proportion},
            {"median_think_tokens", opt_json(s.median_think_tokens)},
            {"median_answer_tokens", opt_json(s.median_answer_tokens)}};
}

}  // namespace

const StateStats& DatasetStats::for_state(probe::CognitiveState s) const {
    switch (s) {
        case probe::CognitiveState::NoHint: return no_hint;
        case probe::CognitiveState::SparseHint: return sparse_hint;
        case probe::CognitiveState::FullHint: return full_hint;
    }
    return no_hint;
}

nlohmann::json DatasetStats::to_json() const {
    return {{"total", total},
            {"per_state",
             {{"no_hint", state_json(no_hint)},
              {"sparse_hint", state_json(sparse_hint)},
              {"full_hint", state_json(full_hint)}}},
            {"overall",
             {{"median_think_tokens", opt_json(overall_median_think_tokens)},
              {"median_answer_tokens", opt_json(overall_median_answer_tokens)}}}};
}

DatasetStats compute_stats(const std::vector<SampleTokens>& samples) {
    if (samples.empty()) throw Error(Err::EmptyDataset, "cannot compute stats of empty dataset");

    DatasetStats stats;
    stats.total = samples.size();

    std::vector<std::uint64_t> think_all;
    std::vector<std::uint64_t> answer_all;
    std::vector<std::uint64_t> think_by_state[3];
    std::vector<std::uint64_t> answer_by_state[3];
    std::size_t counts[3] = {0, 0, 0};

    for (const SampleTokens& s : samples) {
        const int idx = static_cast<int>(s.state);
        ++counts[idx];
        think_by_state[idx].push_back(s.think_tokens);
        answer_by_state[idx].push_back(s.answer_tokens);
        think_all.push_back(s.think_tokens);
        answer_all.push_back(s.answer_tokens);
    }

    StateStats* slots[3] = {&stats.no_hint, &stats.sparse_hint, &stats.full_hint};
    for (int i = 0; i < 3; ++i) {
        slots[i]->count = counts[i];
        slots[i]->proportion = static_cast<double>(counts[i]) / static_cast<double>(stats.total);
        slots[i]->median_think_tokens = lower_median(think_by_state[i]);
        slots[i]->median_answer_tokens = lower_median(answer_by_state[i]);
    }
    stats.overall_median_think_tokens = lower_median(std::move(think_all));
    stats.overall_median_answer_tokens = lower_median(std::move(answer_all));
    return stats;
}

CompressionRatio compression_ratio(std::uint64_t compressed_tokens,
                                   std::uint64_t baseline_tokens) {
    if (baseline_tokens == 0) {
        throw Error(Err::ZeroBaseline, "compression baseline must be positive");
    }
    CompressionRatio r;
    r.value = 1.0 - static_cast<double>(compressed_tokens) / static_cast<double>(baseline_tokens);
    r.expansion = compressed_tokens > baseline_tokens;
    return r;
}

double round_half_up(double value, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::floor(value * scale + 0.5) / scale;
}

nlohmann::json SweepAnalysis::to_json() const {
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [k, n] : first_success_histogram) hist[std::to_string(k)] = n;
    return {{"success_rate_by_k", success_rate_by_k},
            {"continuous_fraction", continuous_fraction},
            {"first_success_histogram", hist},
            {"share_within_first_25", share_within_first_25}};
}

std::string SweepAnalysis::to_csv() const {
    std::ostringstream out;
    out << "k,success_rate\n";
    for (std::size_t k = 0; k < success_rate_by_k.size(); ++k) {
        out << k << ',' << success_rate_by_k[k] << '\n';
    }
    return out.str();
}

SweepAnalysis analyze_sweeps(const std::vector<probe::SweepRecord>& records) {
    if (records.empty()) throw Error(Err::EmptyInput, "no sweep records to analyze");

    SweepAnalysis analysis;
    std::size_t max_k = 0;
    for (const probe::SweepRecord& r : records) {
        if (!r.success_by_k.empty()) max_k = std::max(max_k, r.success_by_k.size() - 1);
    }

    analysis.success_rate_by_k.assign(max_k + 1, 0.0);
    for (std::size_t k = 0; k <= max_k; ++k) {
        std::size_t eligible = 0;
        std::size_t successes = 0;
        for (const probe::SweepRecord& r : records) {
            if (r.success_by_k.size() > k) {
                ++eligible;
                if (r.success_by_k[k]) ++successes;
            }
        }
        analysis.success_rate_by_k[k] =
            eligible == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(eligible);
    }

    std::size_t with_success = 0;
    std::size_t continuous = 0;
    std::size_t hint_requiring = 0;
    std::size_t within_25 = 0;
    for (const probe::SweepRecord& r : records) {
        if (!r.first_success) continue;
        ++with_success;
        if (r.continuous) ++continuous;
        analysis.first_success_histogram[*r.first_success] += 1;
        if (*r.first_success >= 1) {
            ++hint_requiring;
            if (*r.first_success <= 25) ++within_25;
        }
    }
    analysis.continuous_fraction =
        with_success == 0 ? 0.0
                          : static_cast<double>(continuous) / static_cast<double>(with_success);
    analysis.share_within_first_25 =
        hint_requiring == 0 ? 0.0
                            : static_cast<double>(within_25) / static_cast<double>(hint_requiring);
    return analysis;
}

}  // namespace hintforge::analytics
