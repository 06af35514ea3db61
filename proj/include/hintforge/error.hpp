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
#include <stdexcept>
#include <string>

namespace hintforge {

enum class Err {
    // trace parsing / segmentation
    MissingOpenTag,
    MissingCloseTag,
    TagOrderViolation,
    IndexOutOfRange,
    // answer verification
    NoBoxedAnswer,
    JudgeUnavailable,
    JudgeMalformedReply,
    // model gateway
    TransportError,
    AuthError,
    ReplayMiss,
    BudgetExceeded,
    StorageError,
    UnknownProblem,
    // probing
    ProbeBudgetExceeded,
    InvalidKStar,
    // dataset building
    EpisodeCountMismatch,
    EmptyAnswer,
    // analytics
    ZeroBaseline,
    EmptyDataset,
    EmptyInput,
    ExternalCounterUnavailable,
    // orchestration
    MissingUpstream,
    ConfigError,
};

const char* err_name(Err code);

/// All library failures are thrown as Error; code() discriminates, offset()
/// carries a byte position where the contract promises one.
class Error : public std::runtime_error {
public:
    Error(Err code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}
    Error(Err code, std::string message, std::size_t offset)
        : std::runtime_error(std::move(message)), code_(code), offset_(offset), has_offset_(true) {}

    Err code() const noexcept { return code_; }
    bool has_offset() const noexcept { return has_offset_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    Err code_;
    std::size_t offset_ = 0;
    bool has_offset_ = false;
};

}  // namespace hintforge
