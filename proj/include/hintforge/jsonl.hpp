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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace hintforge::jsonl {

/// One parsed object per non-empty line. Throws Error{StorageError} on I/O
/// failure and Error{ConfigError} on malformed JSON (line number in message).
std::vector<nlohmann::json> read_file(const std::filesystem::path& path);

/// Writes one compact object per line, replacing any existing file.
void write_file(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hintforge::jsonl
