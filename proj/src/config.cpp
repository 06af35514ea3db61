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

#include "hintforge/config.hpp"

#include <fstream>

#include "hintforge/jsonl.hpp"
#include "hintforge/prompts.hpp"

namespace hintforge::config {

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& detail) {
    throw Error(Err::ConfigError, "config key \"" + key + "\": " + detail);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    if (value.empty()) return {};
    std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

gateway::SamplingParams parse_params(const nlohmann::json& j, const std::string& key,
                                     gateway::SamplingParams defaults) {
    if (j.is_null()) return defaults;
    try {
        gateway::SamplingParams p = defaults;
        p.temperature = j.value("temperature", p.temperature);
        p.top_p = j.value("top_p", p.top_p);
        p.max_new_tokens = j.value("max_new_tokens", p.max_new_tokens);
        p.n_samples = j.value("n_samples", p.n_samples);
        if (j.contains("seed") && !j["seed"].is_null()) p.seed = j["seed"].get<std::int64_t>();
        p.validate();
        return p;
    } catch (const Error& e) {
        config_error(key, e.what());
    } catch (const nlohmann::json::exception& e) {
        config_error(key, e.what());
    }
}

BackendConfig parse_backend(const nlohmann::json& j, const std::string& key,
                            const std::filesystem::path& base) {
    BackendConfig b;
    if (!j.contains("kind")) config_error(key + ".kind", "missing");
    b.kind = j.at("kind").get<std::string>();
    if (b.kind != "http" && b.kind != "replay" && b.kind != "scripted_traces" &&
        b.kind != "scripted_oracle") {
        config_error(key + ".kind", "unknown backend kind \"" + b.kind + "\"");
    }
    b.model = j.value("model", b.model);
    b.base_url = j.value("base_url", "");
    b.api_key_env = j.value("api_key_env", b.api_key_env);
    b.native_multi_sample = j.value("native_multi_sample", true);
    b.timeout_seconds = j.value("timeout_seconds", b.timeout_seconds);
    if (j.contains("retry")) {
        const nlohmann::json& r = j["retry"];
        b.retry.max_attempts = r.value("max_attempts", b.retry.max_attempts);
        b.retry.initial_backoff_seconds =
            r.value("initial_backoff_seconds", b.retry.initial_backoff_seconds);
        b.retry.backoff_multiplier = r.value("backoff_multiplier", b.retry.backoff_multiplier);
        b.retry.jitter_fraction = r.value("jitter_fraction", b.retry.jitter_fraction);
    }
    b.cassette = resolve(base, j.value("cassette", ""));
    b.traces_file = resolve(base, j.value("traces_file", ""));
    b.oracle_file = resolve(base, j.value("oracle_file", ""));
    b.record_to = resolve(base, j.value("record_to", ""));
    if (j.contains("request_budget") && !j["request_budget"].is_null()) {
        b.request_budget = j["request_budget"].get<std::uint64_t>();
    }

    if (b.kind == "http" && b.base_url.empty()) config_error(key + ".base_url", "required for http");
    if (b.kind == "replay" && b.cassette.empty()) config_error(key + ".cassette", "required for replay");
    if (b.kind == "scripted_traces" && b.traces_file.empty()) {
        config_error(key + ".traces_file", "required for scripted_traces");
    }
    if (b.kind == "scripted_oracle") {
        if (b.oracle_file.empty()) config_error(key + ".oracle_file", "required for scripted_oracle");
        if (b.traces_file.empty()) config_error(key + ".traces_file", "required for scripted_oracle");
    }
    return b;
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Err::ConfigError, "cannot open config: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(Err::ConfigError, "malformed JSON config: " + path.string());

    const std::filesystem::path base = path.has_parent_path()
                                           ? path.parent_path()
                                           : std::filesystem::path(".");
    PipelineConfig cfg;

    if (j.contains("seed") && !j["seed"].is_null()) cfg.seed = j["seed"].get<std::int64_t>();
    if (j.contains("concurrency")) {
        cfg.max_in_flight = j["concurrency"].value("max_in_flight", cfg.max_in_flight);
        if (cfg.max_in_flight < 1) config_error("concurrency.max_in_flight", "must be >= 1");
    }
    cfg.error_threshold = j.value("error_threshold", cfg.error_threshold);

    if (j.contains("markers")) {
        cfg.markers.keywords = j["markers"].get<std::vector<std::string>>();
        try {
            cfg.markers.validate();
        } catch (const Error& e) {
            config_error("markers", e.what());
        }
    }
    if (j.contains("delimiters")) {
        cfg.delimiters.open = j["delimiters"].value("open", cfg.delimiters.open);
        cfg.delimiters.close = j["delimiters"].value("close", cfg.delimiters.close);
    }
    if (j.contains("counter")) {
        const std::string mode = j["counter"].value("mode", "whitespace");
        try {
            cfg.counter.mode = analytics::TokenCounter::mode_from_name(mode);
        } catch (const Error& e) {
            config_error("counter.mode", e.what());
        }
        if (cfg.counter.mode == analytics::TokenCounter::Mode::external) {
            config_error("counter.mode", "external counter requires an endpoint; none is wired");
        }
    }

    if (!j.contains("io")) config_error("io", "missing");
    const nlohmann::json& io = j["io"];
    cfg.io.problems = resolve(base, io.value("problems", ""));
    cfg.io.traces = resolve(base, io.value("traces", ""));
    cfg.io.segmented = resolve(base, io.value("segmented", ""));
    cfg.io.probes = resolve(base, io.value("probes", ""));
    cfg.io.sweeps = resolve(base, io.value("sweeps", ""));
    cfg.io.sweep_analysis = resolve(base, io.value("sweep_analysis", ""));
    cfg.io.sweep_csv = resolve(base, io.value("sweep_csv", ""));
    cfg.io.dataset = resolve(base, io.value("dataset", ""));
    cfg.io.manifest = resolve(base, io.value("manifest", ""));
    cfg.io.stats = resolve(base, io.value("stats", ""));
    cfg.io.eval_report = resolve(base, io.value("eval_report", ""));
    cfg.io.samples = resolve(base, io.value("samples", ""));

    if (!j.contains("backends")) config_error("backends", "missing");
    const nlohmann::json& backends = j["backends"];
    if (!backends.contains("reason")) config_error("backends.reason", "missing");
    if (!backends.contains("instruct")) config_error("backends.instruct", "missing");
    cfg.reason = parse_backend(backends["reason"], "backends.reason", base);
    cfg.instruct = parse_backend(backends["instruct"], "backends.instruct", base);
    if (backends.contains("judge") && !backends["judge"].is_null()) {
        cfg.judge = parse_backend(backends["judge"], "backends.judge", base);
    }

    cfg.generation_params = parse_params(j.value("generation", nlohmann::json::object())
                                             .value("params", nlohmann::json()),
                                         "generation.params", cfg.generation_params);
    if (cfg.seed && !cfg.generation_params.seed) cfg.generation_params.seed = cfg.seed;

    if (j.contains("probe")) {
        const nlohmann::json& p = j["probe"];
        cfg.probe.max_k = p.value("max_k", cfg.probe.max_k);
        cfg.probe.attempts_per_k = p.value("attempts_per_k", cfg.probe.attempts_per_k);
        cfg.probe.success_threshold = p.value("success_threshold", cfg.probe.success_threshold);
        cfg.probe.prompt_template = p.value("prompt_template", cfg.probe.prompt_template);
        cfg.probe.probe_params = parse_params(p.value("params", nlohmann::json()), "probe.params",
                                              cfg.probe.probe_params);
        if (p.contains("budget") && !p["budget"].is_null()) {
            cfg.probe_budget = p["budget"].get<std::uint64_t>();
        }
    }
    if (cfg.probe.prompt_template != prompts::kProbeTemplateId) {
        config_error("probe.prompt_template",
                     "unknown template \"" + cfg.probe.prompt_template + "\"");
    }
    cfg.probe.model_name = cfg.instruct.model;
    if (cfg.seed && !cfg.probe.probe_params.seed) cfg.probe.probe_params.seed = cfg.seed;
    try {
        cfg.probe.validate();
    } catch (const Error& e) {
        config_error("probe", e.what());
    }

    if (j.contains("builder")) {
        const nlohmann::json& b = j["builder"];
        cfg.builder.p0_text = b.value("p0_text", cfg.builder.p0_text);
        const std::string source = b.value("answer_source", "trace_answer");
        if (source == "trace_answer") {
            cfg.builder.answer_source = build::BuilderConfig::AnswerSource::trace_answer;
        } else if (source == "gold_boxed") {
            cfg.builder.answer_source = build::BuilderConfig::AnswerSource::gold_boxed;
        } else {
            config_error("builder.answer_source", "must be trace_answer or gold_boxed");
        }
    }
    cfg.builder.delimiters = cfg.delimiters;
    try {
        cfg.builder.validate();
    } catch (const Error& e) {
        config_error("builder", e.what());
    }

    if (j.contains("verify")) {
        cfg.verify_policy.numeric = j["verify"].value("numeric", cfg.verify_policy.numeric);
        cfg.verify_policy.judge = j["verify"].value("judge", cfg.verify_policy.judge);
        cfg.verify_policy.relative_tolerance =
            j["verify"].value("relative_tolerance", cfg.verify_policy.relative_tolerance);
    }
    if (cfg.verify_policy.judge && !cfg.judge) {
        config_error("verify.judge", "judge enabled but backends.judge is not configured");
    }

    if (j.contains("eval")) {
        const nlohmann::json& e = j["eval"];
        cfg.eval.params = parse_params(e.value("params", nlohmann::json()), "eval.params",
                                       cfg.eval.params);
        const std::string style = e.value("prompt_style", "standard");
        if (style == "standard") {
            cfg.eval.prompt_style = eval::EvalConfig::PromptStyle::standard;
        } else if (style == "budget") {
            cfg.eval.prompt_style = eval::EvalConfig::PromptStyle::budget;
        } else {
            config_error("eval.prompt_style", "must be standard or budget");
        }
        cfg.eval.budget_tokens = e.value("budget_tokens", cfg.eval.budget_tokens);
    }
    cfg.eval.counter = cfg.counter;
    cfg.eval.delimiters = cfg.delimiters;
    cfg.eval.model_name = cfg.reason.model;
    cfg.eval.keep_samples = !cfg.io.samples.empty();
    if (cfg.seed && !cfg.eval.params.seed) cfg.eval.params.seed = cfg.seed;
    try {
        cfg.eval.validate();
    } catch (const Error& e) {
        config_error("eval", e.what());
    }

    return cfg;
}

}  // namespace hintforge::config
