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

#include "hintforge/error.hpp"

#include <cstdio>

#include "hintforge/hash.hpp"

namespace hintforge {

const char* err_name(Err code) {
    switch (code) {
        case Err::MissingOpenTag: return "MissingOpenTag";
        case Err::MissingCloseTag: return "MissingCloseTag";
        case Err::TagOrderViolation: return "TagOrderViolation";
        case Err::IndexOutOfRange: return "IndexOutOfRange";
        case Err::NoBoxedAnswer: return "NoBoxedAnswer";
        case Err::JudgeUnavailable: return "JudgeUnavailable";
        case Err::JudgeMalformedReply: return "JudgeMalformedReply";
        case Err::TransportError: return "TransportError";
        case Err::AuthError: return "AuthError";
        case Err::ReplayMiss: return "ReplayMiss";
        case Err::BudgetExceeded: return "BudgetExceeded";
        case Err::StorageError: return "StorageError";
        case Err::UnknownProblem: return "UnknownProblem";
        case Err::ProbeBudgetExceeded: return "ProbeBudgetExceeded";
        case Err::InvalidKStar: return "InvalidKStar";
        case Err::EpisodeCountMismatch: return "EpisodeCountMismatch";
        case Err::EmptyAnswer: return "EmptyAnswer";
        case Err::ZeroBaseline: return "ZeroBaseline";
        case Err::EmptyDataset: return "EmptyDataset";
        case Err::EmptyInput: return "EmptyInput";
        case Err::ExternalCounterUnavailable: return "ExternalCounterUnavailable";
        case Err::MissingUpstream: return "MissingUpstream";
        case Err::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

std::string fnv1a64_hex(std::string_view data) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

}  // namespace hintforge
