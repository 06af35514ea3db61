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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hintforge/probe.hpp"

namespace hintforge::analytics {

/// Deterministic token accounting. whitespace counts maximal non-whitespace
/// runs, chars_div4 is ceil(len / 4), external delegates to a supplied
/// callable (e.g. a tokenizer endpoint).
struct TokenCounter {
    enum class Mode { whitespace, chars_div4, external };

    Mode mode = Mode::whitespace;
    std::function<std::uint64_t(std::string_view)> external;

    std::uint64_t count(std::string_view text) const;

    static Mode mode_from_name(std::string_view name);
    static const char* mode_name(Mode mode);
};

struct StateStats {
    std::size_t count = 0;
    double proportion = 0.0;
    std::optional<std::uint64_t> median_think_tokens;
    std::optional<std::uint64_t> median_answer_tokens;
};

struct DatasetStats {
    std::size_t total = 0;
    StateStats no_hint;
    StateStats sparse_hint;
    StateStats full_hint;
    std::optional<std::uint64_t> overall_median_think_tokens;
    std::optional<std::uint64_t> overall_median_answer_tokens;

    const StateStats& for_state(probe::CognitiveState s) const;
    nlohmann::json to_json() const;
};

/// The slice of a training sample that statistics need.
struct SampleTokens {
    probe::CognitiveState state = probe::CognitiveState::NoHint;
    std::uint64_t think_tokens = 0;
    std::uint64_t answer_tokens = 0;
};

/// Exact proportions (count / total) and lower-median token counts per state.
/// Throws EmptyDataset on empty input.
DatasetStats compute_stats(const std::vector<SampleTokens>& samples);

struct CompressionRatio {
    double value = 0.0;     // 1 - compressed / baseline, unclamped
    bool expansion = false; // compressed exceeded baseline

    double percent() const { return value * 100.0; }
};

/// Throws ZeroBaseline when baseline_tokens is 0.
CompressionRatio compression_ratio(std::uint64_t compressed_tokens,
                                   std::uint64_t baseline_tokens);

/// Presentation rounding: half-up at `decimals` places.
double round_half_up(double value, int decimals);

struct SweepAnalysis {
    std::vector<double> success_rate_by_k;        // averaged over records with >= k episodes
    double continuous_fraction = 0.0;             // among records with any success
    std::map<std::size_t, std::size_t> first_success_histogram;
    double share_within_first_25 = 0.0;           // among hint-requiring successes

    nlohmann::json to_json() const;
    std::string to_csv() const;  // k,success_rate rows
};

/// Throws EmptyInput on an empty record list.
SweepAnalysis analyze_sweeps(const std::vector<probe::SweepRecord>& records);

}  // namespace hintforge::analytics
