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

#include "hintforge/textscan.hpp"

using namespace hintforge;

namespace {

std::string random_text(std::mt19937& rng, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len_dist(0, max_len);
    std::uniform_int_distribution<int> pick(0, 9);
    static const char* pool = " \t\n\r\v\fabcXYZ.123 ,;<>{}";
    const std::size_t pool_len = 23;
    std::uniform_int_distribution<std::size_t> char_dist(0, pool_len - 1);
    std::string s;
    const std::size_t len = len_dist(rng);
    for (std::size_t i = 0; i < len; ++i) s += pool[char_dist(rng)];
    (void)pick;
    return s;
}

}  // namespace

TEST_CASE("whitespace token counting on known inputs") {
    CHECK(textscan::count_ws_tokens("") == 0);
    CHECK(textscan::count_ws_tokens("a") == 1);
    CHECK(textscan::count_ws_tokens("a b  c") == 3);
    CHECK(textscan::count_ws_tokens("   ") == 0);
    CHECK(textscan::count_ws_tokens("\tone\ntwo\r\nthree ") == 3);
    CHECK(textscan::count_ws_tokens("I don't need deep thinking.") == 5);
}

TEST_CASE("scalar and dispatched token counts agree on random inputs") {
    std::mt19937 rng(20260808);
    for (int i = 0; i < 2000; ++i) {
        const std::string s = random_text(rng, 200);
        CHECK(textscan::count_ws_tokens(s) == textscan::scalar::count_ws_tokens(s.data(), s.size()));
    }
}

TEST_CASE("token counting across simd block boundaries") {
    // lengths straddling the 32-byte block size, with the run crossing the seam
    for (std::size_t len : {31u, 32u, 33u, 63u, 64u, 65u, 95u, 96u, 97u}) {
        std::string all_word(len, 'x');
        CHECK(textscan::count_ws_tokens(all_word) == 1);
        std::string all_ws(len, ' ');
        CHECK(textscan::count_ws_tokens(all_ws) == 0);

        std::string seam = all_word;
        seam[len / 2] = ' ';
        CHECK(textscan::count_ws_tokens(seam) == 2);
    }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 kernels match scalar reference exactly") {
    if (!__builtin_cpu_supports("avx2")) return;

    std::mt19937 rng(99);
    textscan::ByteSet set;
    set.add_case_insensitive('w');
    set.add_case_insensitive('a');
    set.add_case_insensitive('h');
    set.add_case_insensitive('l');
    set.add_case_insensitive('o');

    for (int i = 0; i < 2000; ++i) {
        const std::string s = random_text(rng, 300);
        CHECK(textscan::avx2::count_ws_tokens(s.data(), s.size()) ==
              textscan::scalar::count_ws_tokens(s.data(), s.size()));

        std::vector<std::size_t> got, want;
        textscan::avx2::collect_candidates(s.data(), s.size(), set, got);
        textscan::scalar::collect_candidates(s.data(), s.size(), set, want);
        CHECK(got == want);
    }
}
#endif

TEST_CASE("candidate collection finds exactly the set members") {
    textscan::ByteSet set;
    set.add_case_insensitive('w');
    const std::string text = "Wait, sWap words";
    const std::vector<std::size_t> positions = textscan::collect_candidates(text, set);
    CHECK(positions == std::vector<std::size_t>{0, 7, 11});
}

TEST_CASE("large-alphabet byte sets fall back consistently") {
    textscan::ByteSet set;
    for (unsigned char c = 'a'; c <= 'z'; ++c) set.add(c);  // 26 values: beyond the simd path
    const std::string text = "A quick brown FOX";
    const std::vector<std::size_t> via_dispatch = textscan::collect_candidates(text, set);
    std::vector<std::size_t> via_scalar;
    textscan::scalar::collect_candidates(text.data(), text.size(), set, via_scalar);
    CHECK(via_dispatch == via_scalar);
}

TEST_CASE("active kernel is reported") {
    const std::string kernel = textscan::active_kernel();
    CHECK((kernel == "scalar" || kernel == "avx2"));
}
