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

#include "hintforge/textscan.hpp"

#include <cctype>

namespace hintforge::textscan {

void ByteSet::add_case_insensitive(unsigned char c) {
    table[std::tolower(c)] = true;
    table[std::toupper(c)] = true;
}

std::vector<unsigned char> ByteSet::bytes() const {
    std::vector<unsigned char> out;
    for (int i = 0; i < 256; ++i) {
        if (table[i]) out.push_back(static_cast<unsigned char>(i));
    }
    return out;
}

namespace {

inline bool is_ws(unsigned char c) {
    return c == ' ' || (c >= '\t' && c <= '\r');
}

}  // namespace

namespace scalar {

std::size_t count_ws_tokens(const char* data, std::size_t n) {
    std::size_t count = 0;
    bool in_token = false;
    for (std::size_t i = 0; i < n; ++i) {
        bool ws = is_ws(static_cast<unsigned char>(data[i]));
        if (!ws && !in_token) ++count;
        in_token = !ws;
    }
    return count;
}

void collect_candidates(const char* data, std::size_t n, const ByteSet& set,
                        std::vector<std::size_t>& out) {
    for (std::size_t i = 0; i < n; ++i) {
        if (set.contains(static_cast<unsigned char>(data[i]))) out.push_back(i);
    }
}

}  // namespace scalar

namespace {

using CountFn = std::size_t (*)(const char*, std::size_t);
using CollectFn = void (*)(const char*, std::size_t, const ByteSet&, std::vector<std::size_t>&);

struct Dispatch {
    CountFn count = scalar::count_ws_tokens;
    CollectFn collect = scalar::collect_candidates;
    const char* name = "scalar";
};

Dispatch select_kernels() {
    Dispatch d;
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) {
        d.count = avx2::count_ws_tokens;
        d.collect = avx2::collect_candidates;
        d.name = "avx2";
    }
#endif
    return d;
}

const Dispatch& dispatch() {
    static const Dispatch d = select_kernels();
    return d;
}

}  // namespace

std::size_t count_ws_tokens(std::string_view text) {
    return dispatch().count(text.data(), text.size());
}

std::vector<std::size_t> collect_candidates(std::string_view text, const ByteSet& set) {
    std::vector<std::size_t> out;
    dispatch().collect(text.data(), text.size(), set, out);
    return out;
}

const char* active_kernel() { return dispatch().name; }

}  // namespace hintforge::textscan
