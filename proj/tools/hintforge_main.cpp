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

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hintforge/pipeline.hpp"
#include "hintforge/textscan.hpp"
#include "hintforge/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPartialFailure = 3;

struct CommonArgs {
    std::string config_path;
    std::string input;
    std::string output;
    bool resume = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "pipeline config JSON")->required();
    cmd->add_option("--input", args.input, "override the stage input path");
    cmd->add_option("--output", args.output, "override the stage output path");
    cmd->add_flag("--resume", args.resume, "skip problem ids already in the output");
}

hintforge::pipeline::StageOptions to_options(const CommonArgs& args) {
    hintforge::pipeline::StageOptions opts;
    if (!args.input.empty()) opts.input = args.input;
    if (!args.output.empty()) opts.output = args.output;
    opts.resume = args.resume;
    return opts;
}

using StageFn = hintforge::pipeline::StageResult (*)(const hintforge::config::PipelineConfig&,
                                                     const hintforge::pipeline::StageOptions&);

int run_stage(const CommonArgs& args, StageFn stage, const char* name) {
    const auto cfg = hintforge::config::PipelineConfig::load(args.config_path);
    const hintforge::pipeline::StageResult result = stage(cfg, to_options(args));
    std::fprintf(stderr, "%s: %zu records, %zu errors\n", name, result.total, result.errors);
    if (result.total > 0 && result.error_fraction() > cfg.error_threshold) {
        std::fprintf(stderr, "%s: error fraction %.2f exceeds threshold %.2f\n", name,
                     result.error_fraction(), cfg.error_threshold);
        return kExitPartialFailure;
    }
    return kExitOk;
}

int run_all_cmd(const CommonArgs& args) {
    const auto cfg = hintforge::config::PipelineConfig::load(args.config_path);
    const auto result = hintforge::pipeline::run_all(cfg);
    std::fprintf(stderr,
                 "run-all: generate %zu/%zu, segment %zu/%zu, probe %zu/%zu, build %zu/%zu, "
                 "stats %zu/%zu (errors/records)\n",
                 result.generate.errors, result.generate.total, result.segment.errors,
                 result.segment.total, result.probe.errors, result.probe.total,
                 result.build.errors, result.build.total, result.stats.errors,
                 result.stats.total);
    return result.worst_error_fraction() > cfg.error_threshold ? kExitPartialFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hintforge: difficulty-calibrated variable-length reasoning data pipeline"};
    app.set_version_flag("--version", std::string(hintforge::kVersion) + " (textscan: " +
                                          hintforge::textscan::active_kernel() + ")");
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        StageFn fn;
    };
    const Sub subs[] = {
        {"generate", "generate raw reasoning traces for each problem",
         hintforge::pipeline::stage_generate},
        {"segment", "split traces into think/answer and reflection episodes",
         hintforge::pipeline::stage_segment},
        {"probe", "find the minimum effective hint per problem",
         hintforge::pipeline::stage_probe},
        {"sweep", "probe every hint depth for success-vs-k analysis",
         hintforge::pipeline::stage_sweep},
        {"build", "assemble the variable-length training dataset",
         hintforge::pipeline::stage_build},
        {"stats", "dataset token and state-distribution statistics",
         hintforge::pipeline::stage_stats},
        {"eval", "n-sample evaluation with accuracy and token accounting",
         hintforge::pipeline::stage_eval},
    };

    int exit_code = kExitOk;
    std::vector<std::unique_ptr<CommonArgs>> arg_blocks;
    for (const Sub& sub : subs) {
        auto args = std::make_unique<CommonArgs>();
        CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
        add_common(cmd, *args);
        CommonArgs* args_ptr = args.get();
        StageFn fn = sub.fn;
        const char* name = sub.name;
        cmd->callback([&exit_code, args_ptr, fn, name] { exit_code = run_stage(*args_ptr, fn, name); });
        arg_blocks.push_back(std::move(args));
    }

    auto run_all_args = std::make_unique<CommonArgs>();
    CLI::App* run_all_sub =
        app.add_subcommand("run-all", "generate -> segment -> probe -> build -> stats");
    run_all_sub->add_option("--config", run_all_args->config_path, "pipeline config JSON")
        ->required();
    CommonArgs* run_all_ptr = run_all_args.get();
    run_all_sub->callback([&exit_code, run_all_ptr] { exit_code = run_all_cmd(*run_all_ptr); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const hintforge::Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", hintforge::err_name(e.code()), e.what());
        return e.code() == hintforge::Err::ConfigError ? kExitConfig : kExitError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return exit_code;
}
