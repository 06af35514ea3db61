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
#include <vector>

#include <json.hpp>

namespace hintforge::segment {

/// Self-reflection keyword set that delimits episodes. Matching is
/// case-insensitive at word boundaries; ties at one position go to the
/// longest keyword.
struct MarkerSet {
    std::vector<std::string> keywords;

    /// "wait", "actually", "hmm", "let me reconsider", "on second thought",
    /// "hold on", "let me rethink".
    static MarkerSet defaults();

    void validate() const;  // non-empty, no empty keyword
};

struct Episode {
    std::size_t index = 0;                // 1-based
    std::optional<std::string> marker;    // lowercased keyword; empty only for episode 1
    std::string text;                     // span including the marker itself
};

struct ThinkDelimiters {
    std::string open = "<think>";
    std::string close = "</think>";
};

struct ReasoningTrace {
    std::string problem_id;
    std::string raw_text;
    std::string think_text;   // strictly between the delimiters
    std::string answer_text;  // everything after the closing delimiter
    std::vector<Episode> episodes;
};

/// Splits raw model output at the single think block. Throws Error with
/// MissingOpenTag / MissingCloseTag / TagOrderViolation (byte offset attached);
/// a second open or close tag anywhere is a TagOrderViolation.
std::pair<std::string, std::string> extract_think(std::string_view raw_text,
                                                  const ThinkDelimiters& delims = {});

/// Losslessly partitions think_text: a new episode begins at every
/// case-insensitive word-boundary keyword occurrence (occurrences never
/// overlap; the scan resumes after each match). The first episode runs from
/// offset 0 and is the only one allowed to carry no marker. Empty input
/// yields an empty list.
std::vector<Episode> segment_episodes(std::string_view think_text,
                                      const MarkerSet& markers = MarkerSet::defaults());

/// Concatenation of episodes 1..k; empty for k = 0. Throws IndexOutOfRange
/// when k exceeds the episode count.
std::string join_prefix(const std::vector<Episode>& episodes, std::size_t k);

/// extract_think + segment_episodes in one step.
ReasoningTrace parse_trace(std::string problem_id, std::string raw_text,
                           const ThinkDelimiters& delims = {},
                           const MarkerSet& markers = MarkerSet::defaults());

/// Segmented-record schema:
/// {"problem_id", "think", "answer_text", "episodes": [{"index", "marker", "text"}]}.
/// raw_text is not persisted; a loaded trace carries an empty raw_text.
nlohmann::json trace_to_json(const ReasoningTrace& trace);
ReasoningTrace trace_from_json(const nlohmann::json& j);

}  // namespace hintforge::segment
