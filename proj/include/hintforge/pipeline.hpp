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
#include <memory>
#include <optional>
#include <vector>

#include "hintforge/config.hpp"

namespace hintforge::pipeline {

/// A backend plus the wrappers (recorder, budget) that must outlive it.
struct BackendHandle {
    gateway::Backend* backend = nullptr;
    std::vector<std::unique_ptr<gateway::Backend>> chain;
};

/// Builds the backend described by a config block. Scripted backends need the
/// problem corpus to recognize prompts.
BackendHandle make_backend(const config::BackendConfig& backend_config,
                           const config::PipelineConfig& cfg,
                           const std::shared_ptr<gateway::InFlightLimiter>& limiter);

std::vector<probe::Problem> load_problems(const std::filesystem::path& path);

struct StageResult {
    std::size_t total = 0;
    std::size_t errors = 0;

    double error_fraction() const {
        return total == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(total);
    }
};

/// Per-stage overrides from the command line; unset fields fall back to the
/// config's io paths. All stages skip problem ids already present in their
/// output when resume is set, and rewrite the output sorted by problem_id.
struct StageOptions {
    std::optional<std::filesystem::path> input;
    std::optional<std::filesystem::path> output;
    bool resume = false;
};

StageResult stage_generate(const config::PipelineConfig& cfg, const StageOptions& opts = {});
StageResult stage_segment(const config::PipelineConfig& cfg, const StageOptions& opts = {});
StageResult stage_probe(const config::PipelineConfig& cfg, const StageOptions& opts = {});
StageResult stage_sweep(const config::PipelineConfig& cfg, const StageOptions& opts = {});
StageResult stage_build(const config::PipelineConfig& cfg, const StageOptions& opts = {});
StageResult stage_stats(const config::PipelineConfig& cfg, const StageOptions& opts = {});
StageResult stage_eval(const config::PipelineConfig& cfg, const StageOptions& opts = {});

struct RunAllResult {
    StageResult generate, segment, probe, build, stats;
    double worst_error_fraction() const;
};

/// generate -> segment -> probe -> build -> stats. A stage whose primary
/// output file already exists is skipped, so deleting one output and
/// rerunning regenerates only that stage.
RunAllResult run_all(const config::PipelineConfig& cfg);

}  // namespace hintforge::pipeline
