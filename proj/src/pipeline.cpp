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

#include "hintforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "hintforge/jsonl.hpp"
#include "hintforge/prompts.hpp"

namespace hintforge::pipeline {

namespace {

std::filesystem::path pick(const std::optional<std::filesystem::path>& override_path,
                           const std::filesystem::path& config_path, const char* what) {
    const std::filesystem::path& p = override_path ? *override_path : config_path;
    if (p.empty()) {
        throw Error(Err::ConfigError, std::string("no path configured for ") + what);
    }
    return p;
}

void require_upstream(const std::filesystem::path& path, const char* what) {
    if (!std::filesystem::exists(path)) {
        throw Error(Err::MissingUpstream,
                    std::string(what) + " not found: " + path.string() +
                        " (run the upstream stage first)");
    }
}

/// ids already present in a JSONL output, for resumption
std::set<std::string> existing_ids(const std::filesystem::path& path) {
    std::set<std::string> ids;
    if (!std::filesystem::exists(path)) return ids;
    for (const nlohmann::json& record : jsonl::read_file(path)) {
        if (record.contains("problem_id")) ids.insert(record["problem_id"].get<std::string>());
    }
    return ids;
}

std::vector<nlohmann::json> existing_records(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return {};
    return jsonl::read_file(path);
}

void write_sorted(const std::filesystem::path& path, std::vector<nlohmann::json> records) {
    std::sort(records.begin(), records.end(), [](const nlohmann::json& a, const nlohmann::json& b) {
        return a.value("problem_id", "") < b.value("problem_id", "");
    });
    jsonl::write_file(path, records);
}

/// Incremental appender: completed records land on disk immediately so a
/// killed run can be resumed; the stage rewrites the file sorted at the end.
class IncrementalWriter {
public:
    IncrementalWriter(std::filesystem::path path, std::vector<nlohmann::json> kept)
        : path_(std::move(path)), records_(std::move(kept)) {
        if (path_.has_parent_path()) {
            std::error_code ec;
            std::filesystem::create_directories(path_.parent_path(), ec);
        }
        out_.open(path_, std::ios::out | std::ios::trunc);
        if (!out_) throw Error(Err::StorageError, "cannot open for writing: " + path_.string());
        for (const nlohmann::json& r : records_) out_ << r.dump() << '\n';
        out_.flush();
    }

    void append(nlohmann::json record) {
        std::lock_guard lock(mutex_);
        out_ << record.dump() << '\n';
        out_.flush();
        records_.push_back(std::move(record));
    }

    void finalize_sorted() {
        out_.close();
        write_sorted(path_, std::move(records_));
    }

private:
    std::filesystem::path path_;
    std::vector<nlohmann::json> records_;
    std::ofstream out_;
    std::mutex mutex_;
};

std::map<std::string, probe::Problem> problem_index(const std::vector<probe::Problem>& problems) {
    std::map<std::string, probe::Problem> index;
    for (const probe::Problem& p : problems) index[p.id] = p;
    return index;
}

verify::Verifier make_verifier(const config::PipelineConfig& cfg, BackendHandle* judge_handle) {
    verify::Verifier verifier(cfg.verify_policy);
    if (cfg.verify_policy.judge && judge_handle != nullptr && judge_handle->backend != nullptr) {
        verifier.set_judge(judge_handle->backend, cfg.judge->model);
    }
    return verifier;
}

}  // namespace

std::vector<probe::Problem> load_problems(const std::filesystem::path& path) {
    require_upstream(path, "problems file");
    std::vector<probe::Problem> problems;
    for (const nlohmann::json& record : jsonl::read_file(path)) {
        problems.push_back(probe::Problem::from_json(record));
    }
    return problems;
}

BackendHandle make_backend(const config::BackendConfig& backend_config,
                           const config::PipelineConfig& cfg,
                           const std::shared_ptr<gateway::InFlightLimiter>& limiter) {
    BackendHandle handle;
    std::unique_ptr<gateway::Backend> inner;

    if (backend_config.kind == "http") {
        gateway::HttpBackendConfig http;
        http.base_url = backend_config.base_url;
        http.api_key_env = backend_config.api_key_env;
        http.retry = backend_config.retry;
        http.native_multi_sample = backend_config.native_multi_sample;
        http.timeout_seconds = backend_config.timeout_seconds;
        inner = std::make_unique<gateway::HttpBackend>(std::move(http), limiter);
    } else if (backend_config.kind == "replay") {
        inner = std::make_unique<gateway::ReplayBackend>(
            gateway::Cassette::load(backend_config.cassette));
    } else if (backend_config.kind == "scripted_traces") {
        const auto problems = problem_index(load_problems(cfg.io.problems));
        std::map<std::string, gateway::ScriptedTraceBackend::Entry> entries;
        for (const nlohmann::json& record : jsonl::read_file(backend_config.traces_file)) {
            const std::string id = record.at("problem_id").get<std::string>();
            const auto it = problems.find(id);
            if (it == problems.end()) continue;  // script may cover a superset corpus
            entries[id] = {it->second.question, record.at("raw").get<std::string>()};
        }
        inner = std::make_unique<gateway::ScriptedTraceBackend>(std::move(entries));
    } else if (backend_config.kind == "scripted_oracle") {
        const auto problems = problem_index(load_problems(cfg.io.problems));
        std::map<std::string, segment::ReasoningTrace> traces;
        for (const nlohmann::json& record : jsonl::read_file(backend_config.traces_file)) {
            if (record.contains("error")) continue;
            const std::string id = record.at("problem_id").get<std::string>();
            traces[id] = segment::parse_trace(id, record.at("raw").get<std::string>(),
                                              cfg.delimiters, cfg.markers);
        }
        std::map<std::string, gateway::ScriptedProblem> scripted;
        for (const nlohmann::json& record : jsonl::read_file(backend_config.oracle_file)) {
            const std::string id = record.at("problem_id").get<std::string>();
            const auto pit = problems.find(id);
            if (pit == problems.end()) continue;  // script may cover a superset corpus
            gateway::ScriptedProblem sp;
            sp.question = pit->second.question;
            sp.answer = pit->second.answer;
            for (const nlohmann::json& k : record.at("success_ks")) {
                sp.success_ks.insert(k.get<std::size_t>());
            }
            const auto tit = traces.find(id);
            const std::size_t n = tit == traces.end() ? 0 : tit->second.episodes.size();
            sp.prefixes.reserve(n + 1);
            for (std::size_t k = 0; k <= n; ++k) {
                sp.prefixes.push_back(
                    tit == traces.end() ? std::string()
                                        : segment::join_prefix(tit->second.episodes, k));
            }
            scripted[id] = std::move(sp);
        }
        inner = std::make_unique<gateway::ScriptedOracleBackend>(std::move(scripted));
    } else {
        throw Error(Err::ConfigError, "unknown backend kind: " + backend_config.kind);
    }

    if (!backend_config.record_to.empty()) {
        auto recorder = gateway::record(backend_config.record_to, *inner);
        handle.chain.push_back(std::move(inner));
        inner = std::move(recorder);
    }
    if (backend_config.request_budget) {
        auto budgeted =
            std::make_unique<gateway::BudgetedBackend>(*inner, *backend_config.request_budget);
        handle.chain.push_back(std::move(inner));
        inner = std::move(budgeted);
    }
    handle.backend = inner.get();
    handle.chain.push_back(std::move(inner));
    return handle;
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

StageResult stage_generate(const config::PipelineConfig& cfg, const StageOptions& opts) {
    const auto problems_path = pick(opts.input, cfg.io.problems, "problems input");
    const auto out_path = pick(opts.output, cfg.io.traces, "traces output");
    const std::vector<probe::Problem> problems = load_problems(problems_path);

    auto limiter = std::make_shared<gateway::InFlightLimiter>(cfg.max_in_flight);
    BackendHandle reason = make_backend(cfg.reason, cfg, limiter);

    const std::set<std::string> done = opts.resume ? existing_ids(out_path) : std::set<std::string>{};
    IncrementalWriter writer(out_path,
                             opts.resume ? existing_records(out_path) : std::vector<nlohmann::json>{});

    StageResult result;
    result.total = problems.size();
    std::atomic<std::size_t> errors{0};
    std::atomic<std::size_t> next{0};

    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.max_in_flight, problems.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= problems.size()) return;
                const probe::Problem& problem = problems[i];
                if (done.contains(problem.id)) continue;

                nlohmann::json record{{"problem_id", problem.id}};
                try {
                    gateway::SamplingParams params = cfg.generation_params;
                    params.n_samples = 1;
                    gateway::ChatRequest request = gateway::ChatRequest::single_user(
                        cfg.reason.model, prompts::render_standard(problem.question), params);
                    std::vector<std::string> replies = reason.backend->complete(request);
                    record["raw"] = replies.front();
                    // traces without a think block are kept, but flagged
                    try {
                        segment::extract_think(replies.front(), cfg.delimiters);
                    } catch (const Error& e) {
                        record["error"] = std::string(err_name(e.code())) + ": " + e.what();
                        errors.fetch_add(1);
                    }
                } catch (const Error& e) {
                    record["error"] = std::string(err_name(e.code())) + ": " + e.what();
                    errors.fetch_add(1);
                }
                writer.append(std::move(record));
            }
        });
    }
    for (std::thread& th : pool) th.join();
    writer.finalize_sorted();
    result.errors = errors.load();
    return result;
}

StageResult stage_segment(const config::PipelineConfig& cfg, const StageOptions& opts) {
    const auto in_path = pick(opts.input, cfg.io.traces, "traces input");
    const auto out_path = pick(opts.output, cfg.io.segmented, "segmented output");
    require_upstream(in_path, "traces file");

    const std::set<std::string> done = opts.resume ? existing_ids(out_path) : std::set<std::string>{};
    std::vector<nlohmann::json> records =
        opts.resume ? existing_records(out_path) : std::vector<nlohmann::json>{};

    StageResult result;
    for (const nlohmann::json& trace_record : jsonl::read_file(in_path)) {
        ++result.total;
        const std::string id = trace_record.at("problem_id").get<std::string>();
        if (done.contains(id)) continue;
        if (trace_record.contains("error")) {
            records.push_back({{"problem_id", id}, {"error", trace_record["error"]}});
            ++result.errors;
            continue;
        }
        try {
            segment::ReasoningTrace trace = segment::parse_trace(
                id, trace_record.at("raw").get<std::string>(), cfg.delimiters, cfg.markers);
            records.push_back(segment::trace_to_json(trace));
        } catch (const Error& e) {
            records.push_back(
                {{"problem_id", id}, {"error", std::string(err_name(e.code())) + ": " + e.what()}});
            ++result.errors;
        }
    }
    write_sorted(out_path, std::move(records));
    return result;
}

namespace {

struct ProbeInputs {
    std::vector<probe::Problem> problems;
    std::vector<std::vector<segment::Episode>> episodes;
    std::vector<nlohmann::json> error_records;
    std::size_t total = 0;
};

ProbeInputs gather_probe_inputs(const config::PipelineConfig& cfg,
                                const std::filesystem::path& segmented_path,
                                const std::set<std::string>& done) {
    require_upstream(segmented_path, "segmented traces");
    const auto problems = problem_index(load_problems(cfg.io.problems));

    ProbeInputs inputs;
    for (const nlohmann::json& record : jsonl::read_file(segmented_path)) {
        ++inputs.total;
        const std::string id = record.at("problem_id").get<std::string>();
        if (done.contains(id)) continue;
        if (record.contains("error")) {
            inputs.error_records.push_back({{"problem_id", id}, {"error", record["error"]}});
            continue;
        }
        const auto it = problems.find(id);
        if (it == problems.end()) {
            throw Error(Err::UnknownProblem, "segmented trace for unknown problem " + id);
        }
        inputs.problems.push_back(it->second);
        inputs.episodes.push_back(segment::trace_from_json(record).episodes);
    }
    return inputs;
}

}  // namespace

StageResult stage_probe(const config::PipelineConfig& cfg, const StageOptions& opts) {
    const auto in_path = pick(opts.input, cfg.io.segmented, "segmented input");
    const auto out_path = pick(opts.output, cfg.io.probes, "probes output");

    const std::set<std::string> done = opts.resume ? existing_ids(out_path) : std::set<std::string>{};
    ProbeInputs inputs = gather_probe_inputs(cfg, in_path, done);

    auto limiter = std::make_shared<gateway::InFlightLimiter>(cfg.max_in_flight);
    BackendHandle instruct = make_backend(cfg.instruct, cfg, limiter);
    BackendHandle judge;
    if (cfg.judge) judge = make_backend(*cfg.judge, cfg, limiter);
    const verify::Verifier verifier = make_verifier(cfg, &judge);

    IncrementalWriter writer(out_path,
                             opts.resume ? existing_records(out_path) : std::vector<nlohmann::json>{});
    for (nlohmann::json& err : inputs.error_records) writer.append(std::move(err));

    probe::ProbeBudget budget(cfg.probe_budget);

    probe::probe_corpus(
        inputs.problems, inputs.episodes, *instruct.backend, verifier, cfg.probe,
        cfg.max_in_flight, cfg.probe_budget ? &budget : nullptr,
        [&](const probe::MinEffectiveHint& hint) { writer.append(hint.to_json()); });
    writer.finalize_sorted();

    StageResult result;
    result.total = inputs.total;
    result.errors = inputs.error_records.size();
    return result;
}

StageResult stage_sweep(const config::PipelineConfig& cfg, const StageOptions& opts) {
    const auto in_path = pick(opts.input, cfg.io.segmented, "segmented input");
    const auto out_path = pick(opts.output, cfg.io.sweeps, "sweeps output");

    const std::set<std::string> done = opts.resume ? existing_ids(out_path) : std::set<std::string>{};
    ProbeInputs inputs = gather_probe_inputs(cfg, in_path, done);

    auto limiter = std::make_shared<gateway::InFlightLimiter>(cfg.max_in_flight);
    BackendHandle instruct = make_backend(cfg.instruct, cfg, limiter);
    BackendHandle judge;
    if (cfg.judge) judge = make_backend(*cfg.judge, cfg, limiter);
    const verify::Verifier verifier = make_verifier(cfg, &judge);

    IncrementalWriter writer(out_path,
                             opts.resume ? existing_records(out_path) : std::vector<nlohmann::json>{});
    for (nlohmann::json& err : inputs.error_records) writer.append(std::move(err));

    probe::ProbeBudget budget(cfg.probe_budget);

    probe::sweep_corpus(inputs.problems, inputs.episodes, *instruct.backend, verifier, cfg.probe,
                        cfg.max_in_flight, cfg.probe_budget ? &budget : nullptr,
                        [&](const probe::SweepRecord& rec) { writer.append(rec.to_json()); });
    writer.finalize_sorted();

    // aggregate the full (possibly resumed) sweep file
    std::vector<probe::SweepRecord> all;
    for (const nlohmann::json& record : jsonl::read_file(out_path)) {
        if (record.contains("error")) continue;
        all.push_back(probe::SweepRecord::from_json(record));
    }
    if (!all.empty() && !cfg.io.sweep_analysis.empty()) {
        const analytics::SweepAnalysis analysis = analytics::analyze_sweeps(all);
        jsonl::write_text_file(cfg.io.sweep_analysis, analysis.to_json().dump(2) + "\n");
        if (!cfg.io.sweep_csv.empty()) jsonl::write_text_file(cfg.io.sweep_csv, analysis.to_csv());
    }

    StageResult result;
    result.total = inputs.total;
    result.errors = inputs.error_records.size();
    return result;
}

StageResult stage_build(const config::PipelineConfig& cfg, const StageOptions& opts) {
    const auto segmented_path = pick(opts.input, cfg.io.segmented, "segmented input");
    const auto dataset_path = pick(opts.output, cfg.io.dataset, "dataset output");
    require_upstream(segmented_path, "segmented traces");
    require_upstream(cfg.io.probes, "probe results");

    const auto problems = problem_index(load_problems(cfg.io.problems));

    std::map<std::string, probe::MinEffectiveHint> hints;
    for (const nlohmann::json& record : jsonl::read_file(cfg.io.probes)) {
        if (record.contains("error")) continue;
        probe::MinEffectiveHint hint = probe::MinEffectiveHint::from_json(record);
        hints[hint.problem_id] = std::move(hint);
    }

    const std::set<std::string> done =
        opts.resume ? existing_ids(dataset_path) : std::set<std::string>{};
    std::vector<build::TrainingSample> samples;
    if (opts.resume) {
        for (const nlohmann::json& record : existing_records(dataset_path)) {
            samples.push_back(build::TrainingSample::from_json(record));
        }
    }

    StageResult result;
    for (const nlohmann::json& record : jsonl::read_file(segmented_path)) {
        ++result.total;
        const std::string id = record.at("problem_id").get<std::string>();
        if (done.contains(id)) continue;
        if (record.contains("error")) {
            ++result.errors;
            continue;  // upstream already reported it
        }
        const auto hit = hints.find(id);
        if (hit == hints.end()) {
            throw Error(Err::MissingUpstream, "no probe result for problem " + id);
        }
        const auto pit = problems.find(id);
        if (pit == problems.end()) {
            throw Error(Err::UnknownProblem, "segmented trace for unknown problem " + id);
        }
        segment::ReasoningTrace trace = segment::trace_from_json(record);
        samples.push_back(
            build::build_response(pit->second, trace, hit->second, cfg.builder, cfg.counter));
    }

    std::sort(samples.begin(), samples.end(),
              [](const build::TrainingSample& a, const build::TrainingSample& b) {
                  return a.problem_id < b.problem_id;
              });
    build::write_dataset(samples, dataset_path, pick(std::nullopt, cfg.io.manifest, "manifest"),
                         cfg.builder);
    return result;
}

StageResult stage_stats(const config::PipelineConfig& cfg, const StageOptions& opts) {
    const auto dataset_path = pick(opts.input, cfg.io.dataset, "dataset input");
    const auto stats_path = pick(opts.output, cfg.io.stats, "stats output");
    require_upstream(dataset_path, "dataset");

    std::vector<analytics::SampleTokens> tokens;
    for (const nlohmann::json& record : jsonl::read_file(dataset_path)) {
        build::TrainingSample sample = build::TrainingSample::from_json(record);
        tokens.push_back({sample.state, sample.think_tokens, sample.answer_tokens});
    }
    const analytics::DatasetStats stats = analytics::compute_stats(tokens);
    jsonl::write_text_file(stats_path, stats.to_json().dump(2) + "\n");

    StageResult result;
    result.total = tokens.size();
    return result;
}

StageResult stage_eval(const config::PipelineConfig& cfg, const StageOptions& opts) {
    const auto problems_path = pick(opts.input, cfg.io.problems, "problems input");
    const auto report_path = pick(opts.output, cfg.io.eval_report, "eval report output");
    std::vector<probe::Problem> problems = load_problems(problems_path);

    // resume: keep per-problem entries that already succeeded
    std::map<std::string, nlohmann::json> kept;
    if (opts.resume && std::filesystem::exists(report_path)) {
        nlohmann::json old = nlohmann::json::parse(jsonl::read_text_file(report_path));
        for (const nlohmann::json& p : old.value("problems", nlohmann::json::array())) {
            if (p.contains("error") && !p["error"].is_null()) continue;
            kept[p.at("problem_id").get<std::string>()] = p;
        }
        std::erase_if(problems, [&](const probe::Problem& p) { return kept.contains(p.id); });
    }

    auto limiter = std::make_shared<gateway::InFlightLimiter>(cfg.max_in_flight);
    BackendHandle reason = make_backend(cfg.reason, cfg, limiter);
    BackendHandle judge;
    if (cfg.judge) judge = make_backend(*cfg.judge, cfg, limiter);
    const verify::Verifier verifier = make_verifier(cfg, &judge);

    eval::EvalReport report;
    if (!problems.empty()) {
        report = eval::evaluate(problems, *reason.backend, verifier, cfg.eval, cfg.max_in_flight);
    }

    nlohmann::json out = report.to_json();
    if (!kept.empty()) {
        for (auto& [id, entry] : kept) out["problems"].push_back(entry);
        std::sort(out["problems"].begin(), out["problems"].end(),
                  [](const nlohmann::json& a, const nlohmann::json& b) {
                      return a.value("problem_id", "") < b.value("problem_id", "");
                  });
        // re-aggregate over every problem without an error marker
        double acc = 0.0, think = 0.0, total = 0.0;
        std::size_t ok = 0;
        for (const nlohmann::json& p : out["problems"]) {
            if (p.contains("error") && !p["error"].is_null()) continue;
            ++ok;
            acc += p["accuracy"].get<double>();
            think += p["mean_think_tokens"].get<double>();
            total += p["mean_total_tokens"].get<double>();
        }
        if (ok > 0) {
            out["corpus_accuracy"] = acc / static_cast<double>(ok);
            out["corpus_mean_think_tokens"] = think / static_cast<double>(ok);
            out["corpus_mean_total_tokens"] = total / static_cast<double>(ok);
        }
    }
    jsonl::write_text_file(report_path, out.dump(2) + "\n");

    if (!cfg.io.samples.empty()) {
        jsonl::write_file(cfg.io.samples, report.samples_jsonl());
    }

    StageResult result;
    result.total = out["problems"].size();
    result.errors = report.failed_problems();
    return result;
}

double RunAllResult::worst_error_fraction() const {
    double worst = 0.0;
    for (const StageResult* r : {&generate, &segment, &probe, &build, &stats}) {
        worst = std::max(worst, r->error_fraction());
    }
    return worst;
}

RunAllResult run_all(const config::PipelineConfig& cfg) {
    RunAllResult result;
    const auto fresh = [](const std::filesystem::path& p) { return !std::filesystem::exists(p); };

    if (fresh(cfg.io.traces)) result.generate = stage_generate(cfg);
    if (fresh(cfg.io.segmented)) result.segment = stage_segment(cfg);
    if (fresh(cfg.io.probes)) result.probe = stage_probe(cfg);
    if (fresh(cfg.io.dataset)) result.build = stage_build(cfg);
    if (fresh(cfg.io.stats)) result.stats = stage_stats(cfg);
    return result;
}

}  // namespace hintforge::pipeline
