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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "hintforge/error.hpp"
#include "hintforge/segment.hpp"

using namespace hintforge;
using segment::Episode;
using segment::MarkerSet;

namespace {

// Independent reference scanner: walks the text position by position, applies
// the word-boundary rule directly, takes the longest keyword at a position,
// and resumes after each accepted match. Kept free of the production
// candidate-scan machinery on purpose.
std::vector<std::size_t> reference_boundaries(const std::string& text, const MarkerSet& markers) {
    auto lower = [](char c) {
        return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    };
    auto alnum = [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    };
    std::vector<std::size_t> boundaries;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t best_len = 0;
        if (i == 0 || !alnum(text[i - 1])) {
            for (const std::string& kw : markers.keywords) {
                if (kw.size() <= best_len || i + kw.size() > text.size()) continue;
                bool match = true;
                for (std::size_t j = 0; j < kw.size(); ++j) {
                    if (lower(text[i + j]) != lower(kw[j])) {
                        match = false;
                        break;
                    }
                }
                if (!match) continue;
                if (kw.find(' ') == std::string::npos && i + kw.size() < text.size() &&
                    alnum(text[i + kw.size()])) {
                    continue;
                }
                best_len = kw.size();
            }
        }
        if (best_len > 0) {
            boundaries.push_back(i);
            i += best_len;
        } else {
            ++i;
        }
    }
    return boundaries;
}

std::size_t reference_episode_count(const std::string& text, const MarkerSet& markers) {
    if (text.empty()) return 0;
    const std::vector<std::size_t> b = reference_boundaries(text, markers);
    if (b.empty()) return 1;
    return b.size() + (b.front() == 0 ? 0 : 1);
}

std::string concat(const std::vector<Episode>& eps) {
    std::string out;
    for (const Episode& e : eps) out += e.text;
    return out;
}

// marker-free vocabulary (no keyword appears even as a substring at a boundary)
const std::vector<std::string> kVocab = {
    "the", "sum",  "of",    "terms", "grows",  "fast",  "so",    "we",
    "try", "smaller", "cases", "first", "then", "deduce", "result", "carefully",
    "awaiting", "factually", "shmmm", "waltz", "holdover", "online"};

std::string random_trace(std::mt19937& rng, const MarkerSet& markers, int max_chunks) {
    std::uniform_int_distribution<int> chunks_dist(0, max_chunks);
    std::uniform_int_distribution<int> words_dist(1, 6);
    std::uniform_int_distribution<std::size_t> vocab_dist(0, kVocab.size() - 1);
    std::uniform_int_distribution<std::size_t> kw_dist(0, markers.keywords.size() - 1);
    std::uniform_int_distribution<int> coin(0, 3);

    std::string text;
    const int chunks = chunks_dist(rng);
    for (int c = 0; c < chunks; ++c) {
        if (coin(rng) == 0) {
            std::string kw = markers.keywords[kw_dist(rng)];
            if (coin(rng) == 1) kw[0] = static_cast<char>(std::toupper(kw[0]));
            text += kw;
            text += coin(rng) == 2 ? ", " : " ";
        }
        const int words = words_dist(rng);
        for (int w = 0; w < words; ++w) {
            text += kVocab[vocab_dist(rng)];
            text += (w + 1 == words && coin(rng) == 0) ? ". " : " ";
        }
    }
    return text;
}

}  // namespace

TEST_CASE("think extraction splits at the delimiters") {
    auto [think, answer] = segment::extract_think("<think>abc</think>xyz");
    CHECK(think == "abc");
    CHECK(answer == "xyz");

    auto [think2, answer2] =
        segment::extract_think("<think></think>The answer is $\\boxed{169}$ m/s.");
    CHECK(think2 == "");
    CHECK(answer2 == "The answer is $\\boxed{169}$ m/s.");
}

TEST_CASE("think extraction error cases carry offsets") {
    try {
        segment::extract_think("no tags here");
        FAIL("expected MissingOpenTag");
    } catch (const Error& e) {
        CHECK(e.code() == Err::MissingOpenTag);
    }

    try {
        segment::extract_think("<think>unclosed");
        FAIL("expected MissingCloseTag");
    } catch (const Error& e) {
        CHECK(e.code() == Err::MissingCloseTag);
        CHECK(e.offset() == 0);
    }

    try {
        segment::extract_think("</think>before<think>after");
        FAIL("expected TagOrderViolation");
    } catch (const Error& e) {
        CHECK(e.code() == Err::TagOrderViolation);
        CHECK(e.offset() == 0);
    }

    // a second think block anywhere is rejected
    try {
        segment::extract_think("<think>a</think>mid<think>b</think>");
        FAIL("expected TagOrderViolation");
    } catch (const Error& e) {
        CHECK(e.code() == Err::TagOrderViolation);
        CHECK(e.offset() == 19);
    }
}

TEST_CASE("segmentation golden case with two markers") {
    const auto eps =
        segment::segment_episodes("First compute X. Wait, that fails. Actually use Y.");
    REQUIRE(eps.size() == 3);
    CHECK(!eps[0].marker.has_value());
    CHECK(eps[0].text == "First compute X. ");
    CHECK(eps[1].marker == "wait");
    CHECK(eps[1].text == "Wait, that fails. ");
    CHECK(eps[2].marker == "actually");
    CHECK(eps[2].text == "Actually use Y.");
    CHECK(eps[0].index == 1);
    CHECK(eps[2].index == 3);
}

TEST_CASE("word boundaries protect embedded keywords") {
    CHECK(segment::segment_episodes("I was awaiting results.").size() == 1);
    CHECK(segment::segment_episodes("hmmm, tricky").size() == 1);
    CHECK(segment::segment_episodes("the waiter waited").size() == 1);
    // punctuation after a keyword is a boundary
    CHECK(segment::segment_episodes("so. Hmm, tricky").size() == 2);
}

TEST_CASE("every default keyword starts an episode") {
    const std::string text =
        "start here. wait one. actually two. hmm three. let me reconsider four. "
        "on second thought five. hold on six. let me rethink seven.";
    const auto eps = segment::segment_episodes(text);
    REQUIRE(eps.size() == 8);
    CHECK(eps[1].marker == "wait");
    CHECK(eps[2].marker == "actually");
    CHECK(eps[3].marker == "hmm");
    CHECK(eps[4].marker == "let me reconsider");
    CHECK(eps[5].marker == "on second thought");
    CHECK(eps[6].marker == "hold on");
    CHECK(eps[7].marker == "let me rethink");
}

TEST_CASE("marker at offset zero belongs to the first episode") {
    const auto eps = segment::segment_episodes("Wait here. Hmm there.");
    REQUIRE(eps.size() == 2);
    CHECK(eps[0].marker == "wait");
    CHECK(eps[0].text == "Wait here. ");
    CHECK(eps[1].marker == "hmm");
}

TEST_CASE("adjacent markers yield a marker-only episode") {
    const auto eps = segment::segment_episodes("Wait wait that is odd");
    REQUIRE(eps.size() == 2);
    CHECK(eps[0].text == "Wait ");
    CHECK(eps[1].text == "wait that is odd");
}

TEST_CASE("empty think text yields no episodes") {
    CHECK(segment::segment_episodes("").empty());
}

TEST_CASE("custom marker sets are honored and validated") {
    MarkerSet custom{{"let me verify", "wait"}};
    const auto eps = segment::segment_episodes("a b. let me verify c. wait d.", custom);
    REQUIRE(eps.size() == 3);
    CHECK(eps[1].marker == "let me verify");

    CHECK_THROWS_AS(segment::segment_episodes("x", MarkerSet{{}}), Error);
    CHECK_THROWS_AS(segment::segment_episodes("x", MarkerSet{{""}}), Error);
}

TEST_CASE("randomized traces match the reference scanner") {
    const MarkerSet markers = MarkerSet::defaults();
    std::mt19937 rng(424242);
    for (int i = 0; i < 200; ++i) {
        const std::string text = random_trace(rng, markers, 12);
        const auto eps = segment::segment_episodes(text, markers);
        CHECK(eps.size() == reference_episode_count(text, markers));

        // boundary positions, not just counts
        std::vector<std::size_t> got;
        std::size_t offset = 0;
        for (const Episode& e : eps) {
            if (e.marker) got.push_back(offset);
            offset += e.text.size();
        }
        std::vector<std::size_t> want = reference_boundaries(text, markers);
        if (!eps.empty() && !eps[0].marker.has_value()) {
            CHECK(got == want);
        } else if (!eps.empty()) {
            REQUIRE(!want.empty());
            CHECK(want.front() == 0);
            CHECK(got == want);
        }
    }
}

TEST_CASE("lossless partition and idempotence properties") {
    const MarkerSet markers = MarkerSet::defaults();
    std::mt19937 rng(7);
    for (int i = 0; i < 500; ++i) {
        const std::string text = random_trace(rng, markers, 10);
        const auto eps = segment::segment_episodes(text, markers);
        CHECK(concat(eps) == text);

        const auto again = segment::segment_episodes(concat(eps), markers);
        REQUIRE(again.size() == eps.size());
        for (std::size_t j = 0; j < eps.size(); ++j) {
            CHECK(again[j].text == eps[j].text);
            CHECK(again[j].marker == eps[j].marker);
        }

        for (const Episode& e : eps) {
            CHECK(!e.text.empty());
            if (e.index > 1) {
                REQUIRE(e.marker.has_value());
                // case-insensitive marker match at offset 0
                REQUIRE(e.text.size() >= e.marker->size());
                for (std::size_t c = 0; c < e.marker->size(); ++c) {
                    CHECK(std::tolower(static_cast<unsigned char>(e.text[c])) == (*e.marker)[c]);
                }
            }
        }
    }
}

TEST_CASE("prefix joins are consistent nested prefixes") {
    const auto eps = segment::segment_episodes("AB. Wait CD. Hmm EF.");
    REQUIRE(eps.size() == 3);
    CHECK(segment::join_prefix(eps, 0) == "");
    CHECK(segment::join_prefix(eps, 1) == "AB. ");
    CHECK(segment::join_prefix(eps, 3) == "AB. Wait CD. Hmm EF.");

    for (std::size_t k = 0; k < eps.size(); ++k) {
        const std::string shorter = segment::join_prefix(eps, k);
        const std::string longer = segment::join_prefix(eps, k + 1);
        CHECK(longer.substr(0, shorter.size()) == shorter);
    }

    CHECK_THROWS_AS(segment::join_prefix(eps, 4), Error);
}

TEST_CASE("parse_trace wires extraction and segmentation together") {
    const segment::ReasoningTrace trace = segment::parse_trace(
        "t1", "<think>One step. Wait, two steps.</think>Answer: $\\boxed{5}$.");
    CHECK(trace.problem_id == "t1");
    CHECK(trace.think_text == "One step. Wait, two steps.");
    CHECK(trace.answer_text == "Answer: $\\boxed{5}$.");
    REQUIRE(trace.episodes.size() == 2);
    CHECK(concat(trace.episodes) == trace.think_text);
}

TEST_CASE("segmented records round-trip through json") {
    const segment::ReasoningTrace trace = segment::parse_trace(
        "t2", "<think>Plan. Hmm, revise. Actually, solve.</think>Done: $\\boxed{1}$.");
    const nlohmann::json j = segment::trace_to_json(trace);
    CHECK(j.at("problem_id") == "t2");
    CHECK(j.at("think") == trace.think_text);
    CHECK(j.at("episodes").size() == 3);
    CHECK(j.at("episodes")[0].at("marker").is_null());
    CHECK(j.at("episodes")[1].at("marker") == "hmm");

    const segment::ReasoningTrace back = segment::trace_from_json(j);
    CHECK(back.think_text == trace.think_text);
    CHECK(back.answer_text == trace.answer_text);
    REQUIRE(back.episodes.size() == trace.episodes.size());
    CHECK(back.episodes[2].text == trace.episodes[2].text);
}
