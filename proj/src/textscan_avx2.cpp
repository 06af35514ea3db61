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

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <bit>

#include "hintforge/textscan.hpp"

namespace hintforge::textscan::avx2 {

namespace {

// whitespace = 0x20 or 0x09..0x0D
inline std::uint32_t ws_mask32(__m256i block) {
    const __m256i space = _mm256_set1_epi8(' ');
    const __m256i nine = _mm256_set1_epi8(9);
    const __m256i four = _mm256_set1_epi8(4);
    __m256i eq_space = _mm256_cmpeq_epi8(block, space);
    // (c - 9) <= 4 unsigned  <=>  saturating((c - 9) - 4) == 0
    __m256i shifted = _mm256_sub_epi8(block, nine);
    __m256i in_range = _mm256_cmpeq_epi8(_mm256_subs_epu8(shifted, four), _mm256_setzero_si256());
    return static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_or_si256(eq_space, in_range)));
}

}  // namespace

std::size_t count_ws_tokens(const char* data, std::size_t n) {
    std::size_t count = 0;
    std::uint32_t carry = 0;  // low bit set if the previous byte was non-whitespace
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i block = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
        std::uint32_t nonws = ~ws_mask32(block);
        std::uint32_t starts = nonws & ~((nonws << 1) | carry);
        count += static_cast<std::size_t>(std::popcount(starts));
        carry = (nonws >> 31) & 1u;
    }
    bool in_token = carry != 0;
    for (; i < n; ++i) {
        unsigned char c = static_cast<unsigned char>(data[i]);
        bool ws = (c == ' ') || (c >= '\t' && c <= '\r');
        if (!ws && !in_token) ++count;
        in_token = !ws;
    }
    return count;
}

void collect_candidates(const char* data, std::size_t n, const ByteSet& set,
                        std::vector<std::size_t>& out) {
    const std::vector<unsigned char> values = set.bytes();
    // cmpeq-per-value only pays off for small alphabets; large sets go scalar
    if (values.empty() || values.size() > 16) {
        scalar::collect_candidates(data, n, set, out);
        return;
    }
    __m256i needles[16];
    for (std::size_t v = 0; v < values.size(); ++v) {
        needles[v] = _mm256_set1_epi8(static_cast<char>(values[v]));
    }
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i block = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
        __m256i acc = _mm256_setzero_si256();
        for (std::size_t v = 0; v < values.size(); ++v) {
            acc = _mm256_or_si256(acc, _mm256_cmpeq_epi8(block, needles[v]));
        }
        std::uint32_t mask = static_cast<std::uint32_t>(_mm256_movemask_epi8(acc));
        while (mask != 0) {
            unsigned bit = static_cast<unsigned>(std::countr_zero(mask));
            out.push_back(i + bit);
            mask &= mask - 1;
        }
    }
    for (; i < n; ++i) {
        if (set.contains(static_cast<unsigned char>(data[i]))) out.push_back(i);
    }
}

}  // namespace hintforge::textscan::avx2

#endif  // x86-64
