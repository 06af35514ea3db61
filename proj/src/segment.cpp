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

#include "hintforge/segment.hpp"

#include <algorithm>
#include <cctype>

#include "hintforge/error.hpp"
#include "hintforge/textscan.hpp"

namespace hintforge::segment {

namespace {

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline bool is_word_char(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z');
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = ascii_lower(c);
    return out;
}

bool matches_at(std::string_view text, std::size_t pos, const std::string& keyword_lower) {
    if (pos + keyword_lower.size() > text.size()) return false;
    for (std::size_t i = 0; i < keyword_lower.size(); ++i) {
        if (ascii_lower(text[pos + i]) != keyword_lower[i]) return false;
    }
    return true;
}

struct Occurrence {
    std::size_t pos;
    const std::string* keyword;  // lowercased
};

// Leftmost-longest, non-overlapping keyword occurrences at word boundaries.
// Word boundary: the byte before the match is absent or non-alphanumeric;
// single-word keywords additionally require the byte after to be absent or
// non-alphanumeric (so "awaiting" never splits at "wait").
std::vector<Occurrence> find_occurrences(std::string_view text,
                                         const std::vector<std::string>& keywords_lower) {
    std::vector<Occurrence> occurrences;
    if (text.empty()) return occurrences;

    textscan::ByteSet first_bytes;
    for (const std::string& kw : keywords_lower) {
        first_bytes.add_case_insensitive(static_cast<unsigned char>(kw.front()));
    }
    const std::vector<std::size_t> candidates = textscan::collect_candidates(text, first_bytes);

    std::size_t resume_at = 0;  // end of the last accepted occurrence
    for (std::size_t pos : candidates) {
        if (pos < resume_at) continue;
        if (pos > 0 && is_word_char(text[pos - 1])) continue;

        const std::string* best = nullptr;
        for (const std::string& kw : keywords_lower) {
            if (best && kw.size() <= best->size()) continue;
            if (!matches_at(text, pos, kw)) continue;
            bool single_word = kw.find(' ') == std::string::npos;
            if (single_word) {
                std::size_t end = pos + kw.size();
                if (end < text.size() && is_word_char(text[end])) continue;
            }
            best = &kw;
        }
        if (best) {
            occurrences.push_back({pos, best});
            resume_at = pos + best->size();
        }
    }
    return occurrences;
}

}  // namespace

MarkerSet MarkerSet::defaults() {
    return MarkerSet{{"wait", "actually", "hmm", "let me reconsider", "on second thought",
                      "hold on", "let me rethink"}};
}

void MarkerSet::validate() const {
    if (keywords.empty()) {
        throw Error(Err::ConfigError, "marker set must not be empty");
    }
    for (const std::string& kw : keywords) {
        if (kw.empty()) throw Error(Err::ConfigError, "marker keyword must not be empty");
    }
}

std::pair<std::string, std::string> extract_think(std::string_view raw_text,
                                                  const ThinkDelimiters& delims) {
    const std::size_t open_pos = raw_text.find(delims.open);
    if (open_pos == std::string_view::npos) {
        throw Error(Err::MissingOpenTag, "no opening think delimiter", raw_text.size());
    }
    const std::size_t close_pos = raw_text.find(delims.close);
    if (close_pos == std::string_view::npos) {
        throw Error(Err::MissingCloseTag, "no closing think delimiter", open_pos);
    }
    if (close_pos < open_pos + delims.open.size()) {
        throw Error(Err::TagOrderViolation, "closing delimiter precedes opening delimiter",
                    close_pos);
    }
    // exactly one think block: any further tag is a violation
    const std::size_t extra_open = raw_text.find(delims.open, open_pos + delims.open.size());
    if (extra_open != std::string_view::npos) {
        throw Error(Err::TagOrderViolation, "second opening delimiter", extra_open);
    }
    const std::size_t extra_close = raw_text.find(delims.close, close_pos + delims.close.size());
    if (extra_close != std::string_view::npos) {
        throw Error(Err::TagOrderViolation, "second closing delimiter", extra_close);
    }

    std::string think(raw_text.substr(open_pos + delims.open.size(), close_pos - open_pos - delims.open.size()));
    std::string answer(raw_text.substr(close_pos + delims.close.size()));
    return {std::move(think), std::move(answer)};
}

std::vector<Episode> segment_episodes(std::string_view think_text, const MarkerSet& markers) {
    markers.validate();
    std::vector<Episode> episodes;
    if (think_text.empty()) return episodes;

    std::vector<std::string> keywords_lower;
    keywords_lower.reserve(markers.keywords.size());
    for (const std::string& kw : markers.keywords) keywords_lower.push_back(to_lower(kw));

    const std::vector<Occurrence> occurrences = find_occurrences(think_text, keywords_lower);

    std::vector<std::size_t> boundaries;
    std::vector<std::optional<std::string>> boundary_markers;
    if (occurrences.empty() || occurrences.front().pos != 0) {
        boundaries.push_back(0);
        boundary_markers.push_back(std::nullopt);
    }
    for (const Occurrence& occ : occurrences) {
        boundaries.push_back(occ.pos);
        boundary_markers.push_back(*occ.keyword);
    }

    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        std::size_t begin = boundaries[i];
        std::size_t end = (i + 1 < boundaries.size()) ? boundaries[i + 1] : think_text.size();
        Episode ep;
        ep.index = i + 1;
        ep.marker = boundary_markers[i];
        ep.text.assign(think_text.substr(begin, end - begin));
        episodes.push_back(std::move(ep));
    }
    return episodes;
}

std::string join_prefix(const std::vector<Episode>& episodes, std::size_t k) {
    if (k > episodes.size()) {
        throw Error(Err::IndexOutOfRange,
                    "prefix length " + std::to_string(k) + " exceeds episode count " +
                        std::to_string(episodes.size()));
    }
    std::string out;
    for (std::size_t i = 0; i < k; ++i) out += episodes[i].text;
    return out;
}

ReasoningTrace parse_trace(std::string problem_id, std::string raw_text,
                           const ThinkDelimiters& delims, const MarkerSet& markers) {
    ReasoningTrace trace;
    trace.problem_id = std::move(problem_id);
    auto [think, answer] = extract_think(raw_text, delims);
    trace.raw_text = std::move(raw_text);
    trace.think_text = std::move(think);
    trace.answer_text = std::move(answer);
    trace.episodes = segment_episodes(trace.think_text, markers);
    return trace;
}

nlohmann::json trace_to_json(const ReasoningTrace& trace) {
    nlohmann::json eps = nlohmann::json::array();
    for (const Episode& ep : trace.episodes) {
        eps.push_back({{"index", ep.index},
                       {"marker", ep.marker ? nlohmann::json(*ep.marker) : nlohmann::json(nullptr)},
                       {"text", ep.text}});
    }
    return {{"problem_id", trace.problem_id},
            {"think", trace.think_text},
            {"answer_text", trace.answer_text},
            {"episodes", eps}};
}

ReasoningTrace trace_from_json(const nlohmann::json& j) {
    ReasoningTrace trace;
    trace.problem_id = j.at("problem_id").get<std::string>();
    trace.think_text = j.at("think").get<std::string>();
    trace.answer_text = j.at("answer_text").get<std::string>();
    for (const nlohmann::json& e : j.at("episodes")) {
        Episode ep;
        ep.index = e.at("index").get<std::size_t>();
        if (e.contains("marker") && !e["marker"].is_null()) {
            ep.marker = e["marker"].get<std::string>();
        }
        ep.text = e.at("text").get<std::string>();
        trace.episodes.push_back(std::move(ep));
    }
    return trace;
}

}  // namespace hintforge::segment
