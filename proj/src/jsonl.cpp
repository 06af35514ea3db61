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

#include "hintforge/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "hintforge/error.hpp"

namespace hintforge::jsonl {

std::vector<nlohmann::json> read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Err::StorageError, "cannot open for reading: " + path.string());
    std::vector<nlohmann::json> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded()) {
            throw Error(Err::ConfigError,
                        path.string() + ":" + std::to_string(line_no) + ": malformed JSON line");
        }
        records.push_back(std::move(parsed));
    }
    return records;
}

void write_file(const std::filesystem::path& path, const std::vector<nlohmann::json>& records) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::out | std::ios::trunc);
    if (!out) throw Error(Err::StorageError, "cannot open for writing: " + path.string());
    for (const nlohmann::json& record : records) {
        out << record.dump() << '\n';
    }
    if (!out) throw Error(Err::StorageError, "write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Err::StorageError, "cannot open for reading: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Err::StorageError, "cannot open for writing: " + path.string());
    out << text;
    if (!out) throw Error(Err::StorageError, "write failed: " + path.string());
}

}  // namespace hintforge::jsonl
