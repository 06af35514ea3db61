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

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

// Byte-scanning kernels for the hot loops that walk whole reasoning traces:
// whitespace-token counting and marker-candidate scanning. Each kernel has a
// scalar reference implementation and, on x86-64, an AVX2 variant selected at
// runtime. The dispatched entry points and the scalar references must agree
// byte-for-byte on every input; the test suite checks them against each other
// on randomized data.

namespace hintforge::textscan {

/// Membership table over byte values, used to describe candidate start bytes.
struct ByteSet {
    bool table[256] = {};

    void add(unsigned char c) { table[c] = true; }
    void add_case_insensitive(unsigned char c);
    bool contains(unsigned char c) const { return table[c]; }
    /// Distinct bytes present, in ascending order.
    std::vector<unsigned char> bytes() const;
};

namespace scalar {
std::size_t count_ws_tokens(const char* data, std::size_t n);
void collect_candidates(const char* data, std::size_t n, const ByteSet& set,
                        std::vector<std::size_t>& out);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
std::size_t count_ws_tokens(const char* data, std::size_t n);
void collect_candidates(const char* data, std::size_t n, const ByteSet& set,
                        std::vector<std::size_t>& out);
}  // namespace avx2
#endif

/// Number of maximal runs of non-whitespace bytes (whitespace = " \t\n\v\f\r").
std::size_t count_ws_tokens(std::string_view text);

/// Positions of every byte of `text` contained in `set`, ascending.
std::vector<std::size_t> collect_candidates(std::string_view text, const ByteSet& set);

/// Name of the kernel set chosen at startup ("scalar" or "avx2").
const char* active_kernel();

}  // namespace hintforge::textscan
