// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

// pick: run the drawing-analysis pipeline over a manifest, train the reward
// scorer, and recompute metrics from saved reports.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pick/backend.hpp"
#include "pick/embedder.hpp"
#include "pick/errors.hpp"
#include "pick/feature_policy.hpp"
#include "pick/knowledge_base.hpp"
#include "pick/metrics.hpp"
#include "pick/pipeline.hpp"
#include "pick/prompt.hpp"
#include "pick/report.hpp"
#include "pick/reward_model.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitCaseErrors = 2;

std::vector<std::string> split_classes(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::vector<pick::TrainingExample> examples_from_kb(const pick::KnowledgeBase& kb) {
    std::vector<pick::TrainingExample> out;
    out.reserve(kb.size());
    for (const auto& r : kb.records()) out.push_back({r.head, r.soft_label});
    return out;
}

struct CommonKbOptions {
    std::string kb;
    std::string lexicon;
    std::string classes;
    std::string embed_endpoint;
};

std::vector<std::string> resolve_classes(const std::string& task, const std::string& classes) {
    if (!classes.empty()) {
        auto names = split_classes(classes);
        if (names.size() < 2) throw pick::ValidationError("--classes needs at least two names");
        return names;
    }
    if (task == "emotion") throw pick::ValidationError("--task emotion requires --classes");
    return pick::binary_class_names();
}

std::unique_ptr<pick::Embedder> make_embedder(const std::string& endpoint, std::chrono::milliseconds timeout,
                                              int retries) {
    if (endpoint.empty()) return std::make_unique<pick::HashedTrigramEmbedder>();
    pick::HttpEmbedderConfig cfg;
    cfg.endpoint = endpoint;
    cfg.timeout = timeout;
    cfg.max_retries = retries;
    return std::make_unique<pick::HttpEmbedder>(cfg);
}

struct RunOptions {
    CommonKbOptions kb;
    std::string manifest;
    std::string task = "htp";
    std::string backend = "mock";
    std::string vocab;
    std::uint64_t seed = 0;
    std::string out;
    std::string endpoint;
    std::string model;
    std::string api_key_env = "PICK_API_KEY";
    int max_retries = 3;
    double timeout_secs = 60.0;
    std::ptrdiff_t max_in_flight = 4;
    std::size_t case_concurrency = 2;
    std::string templates;
    std::string scorer;
    std::string detector_endpoint;
    std::string annotated_dir;
    std::string policy_in;
    std::string policy_out;
    std::size_t group_size = 4;
    double policy_lr = 0.1;
    std::size_t slot_budget = 200;
    std::size_t n_dynamic = 2;
    std::string feature_generator = "policy";
    std::string dedupe_metric = "overlap";
    std::optional<std::string> generic_features;
    bool record_wall_time = false;
};

int run_command(const RunOptions& o) {
    const auto task = pick::task_from_string(o.task);
    const auto classes = resolve_classes(o.task, o.kb.classes);
    const std::chrono::milliseconds timeout{static_cast<long long>(o.timeout_secs * 1000.0)};
    if (o.timeout_secs <= 0.0) throw pick::ValidationError("--timeout-secs must be positive");

    auto config = pick::PipelineConfig::for_task(task, classes);
    config.seed = o.seed;
    config.n_dynamic = o.n_dynamic;
    config.case_concurrency = o.case_concurrency;
    config.record_wall_time = o.record_wall_time;
    config.adaptation = {o.group_size, o.policy_lr, o.slot_budget};
    config.feature_generator =
        o.feature_generator == "backend" ? pick::FeatureGeneratorMode::kBackend : pick::FeatureGeneratorMode::kPolicy;
    config.decompose.metric =
        o.dedupe_metric == "iou" ? pick::DedupeMetric::kIoU : pick::DedupeMetric::kOverlapOverSmaller;
    if (o.generic_features) config.generic_features = split_classes(*o.generic_features);
    if (!o.annotated_dir.empty()) config.annotated_dir = o.annotated_dir;

    const auto cases = pick::load_manifest(o.manifest);

    std::shared_ptr<pick::Backend> backend;
    if (o.backend == "mock") {
        backend = std::make_shared<pick::MockBackend>(o.seed, classes);
    } else {
        if (o.endpoint.empty()) throw pick::ValidationError("--backend http requires --endpoint");
        pick::HttpBackendConfig cfg{o.endpoint, o.model, ""};
        if (const char* key = std::getenv(o.api_key_env.c_str())) cfg.api_key = key;
        backend = std::make_shared<pick::HttpBackend>(cfg);
    }
    auto templates =
        o.templates.empty() ? pick::TemplateSet(classes) : pick::TemplateSet::load(o.templates, classes);
    pick::BackendGateway gateway(backend, std::move(templates), {o.max_retries, timeout, o.max_in_flight});

    const auto embedder = make_embedder(o.kb.embed_endpoint, timeout, o.max_retries);
    const auto kb = pick::ingest_kb(o.kb.kb, o.kb.lexicon, *embedder, classes);
    const auto scorer = o.scorer.empty() ? pick::train_scorer(examples_from_kb(kb)) : pick::TextScorer::load(o.scorer);

    auto policy = !o.policy_in.empty() ? pick::FeaturePolicy::load(o.policy_in)
                  : o.vocab.empty()    ? pick::FeaturePolicy(pick::FeatureVocabulary{}, o.seed, o.policy_lr)
                                       : pick::FeaturePolicy(pick::FeatureVocabulary::load(o.vocab), o.seed, o.policy_lr);

    pick::PipelineResources resources{gateway, kb, *embedder, scorer, policy, {}};
    if (!o.detector_endpoint.empty()) resources.detector = pick::make_http_detector(o.detector_endpoint, timeout);

    const auto report = pick::run_corpus(cases, config, resources);
    pick::write_text_file(o.out, pick::to_json(report));
    if (!o.policy_out.empty()) policy.save(o.policy_out);

    std::cerr << "pick: " << report.cases.size() << " cases, " << report.errored_count << " errored";
    if (report.metrics) std::cerr << ", accuracy " << report.metrics->accuracy;
    std::cerr << "\n";
    for (const auto& c : report.cases) {
        if (c.errored) std::cerr << "pick: case " << c.id << " errored: " << c.error << "\n";
    }
    return report.errored_count > 0 ? kExitCaseErrors : kExitOk;
}

struct TrainOptions {
    CommonKbOptions kb;
    std::string task = "htp";
    std::string out;
    std::size_t epochs = 200;
    double lr = 0.1;
};

int train_command(const TrainOptions& o) {
    const auto classes = resolve_classes(o.task, o.kb.classes);
    const auto embedder = make_embedder(o.kb.embed_endpoint, std::chrono::milliseconds{60'000}, 3);
    const auto kb = pick::ingest_kb(o.kb.kb, o.kb.lexicon, *embedder, classes);
    pick::TrainerConfig cfg;
    cfg.epochs = o.epochs;
    cfg.learning_rate = o.lr;
    const auto scorer = pick::train_scorer(examples_from_kb(kb), cfg);
    scorer.save(o.out);
    std::cerr << "pick: trained on " << kb.size() << " triplets, loss " << scorer.meta().initial_loss << " -> "
              << scorer.meta().final_loss << "\n";
    return kExitOk;
}

int eval_command(const std::vector<std::string>& reports, const std::string& out) {
    std::vector<pick::CaseReport> cases;
    std::vector<std::string> classes;
    for (const auto& path : reports) {
        auto r = pick::load_run_report(path);
        if (classes.empty()) {
            classes = r.class_names;
        } else if (classes != r.class_names) {
            throw pick::ValidationError("report " + path + " uses a different class list");
        }
        for (auto& c : r.cases) cases.push_back(std::move(c));
    }
    const auto metrics = pick::metrics_for_cases(cases, classes);
    if (!metrics) throw pick::MetricsError("no successful labelled cases in the given reports");
    pick::write_text_file(out, pick::to_json(*metrics));
    return kExitOk;
}

void add_kb_options(CLI::App* cmd, CommonKbOptions& kb) {
    cmd->add_option("--kb", kb.kb, "knowledge-base triplets (JSONL)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--lexicon", kb.lexicon, "tail-term soft labels (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--classes", kb.classes, "comma-separated class names");
    cmd->add_option("--embed-endpoint", kb.embed_endpoint, "embedding service URL (default: hashed trigrams)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pick: multi-level drawing analysis"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "analyze every case of a manifest");
    run_cmd->add_option("--manifest", run.manifest, "case manifest (JSONL)")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--task", run.task, "htp or emotion")->check(CLI::IsMember({"htp", "emotion"}));
    run_cmd->add_option("--backend", run.backend, "mock or http")->check(CLI::IsMember({"mock", "http"}));
    add_kb_options(run_cmd, run.kb);
    run_cmd->add_option("--vocab", run.vocab, "feature vocabulary (JSON)")->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", run.seed, "run seed");
    run_cmd->add_option("--out", run.out, "report path")->required();
    run_cmd->add_option("--endpoint", run.endpoint, "model endpoint for --backend http");
    run_cmd->add_option("--model", run.model, "model name sent to the endpoint");
    run_cmd->add_option("--api-key-env", run.api_key_env, "environment variable holding the API key");
    run_cmd->add_option("--max-retries", run.max_retries)->check(CLI::NonNegativeNumber);
    run_cmd->add_option("--timeout-secs", run.timeout_secs)->check(CLI::PositiveNumber);
    run_cmd->add_option("--max-in-flight", run.max_in_flight)->check(CLI::PositiveNumber);
    run_cmd->add_option("--case-concurrency", run.case_concurrency)->check(CLI::PositiveNumber);
    run_cmd->add_option("--templates", run.templates, "prompt template overrides (JSON)")->check(CLI::ExistingFile);
    run_cmd->add_option("--scorer", run.scorer, "trained reward scorer (default: train on the KB)")
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--detector-endpoint", run.detector_endpoint, "detection service for cases without detections");
    run_cmd->add_option("--annotated-dir", run.annotated_dir, "write focus-annotated views here");
    run_cmd->add_option("--policy-in", run.policy_in, "resume from a policy checkpoint")->check(CLI::ExistingFile);
    run_cmd->add_option("--policy-out", run.policy_out, "write the adapted policy");
    run_cmd->add_option("--group-size", run.group_size)->check(CLI::Range(2, 1 << 20));
    run_cmd->add_option("--policy-lr", run.policy_lr)->check(CLI::PositiveNumber);
    run_cmd->add_option("--slot-budget", run.slot_budget);
    run_cmd->add_option("--n-dynamic", run.n_dynamic);
    run_cmd->add_option("--generic-features", run.generic_features, "comma-separated generic features");
    run_cmd->add_option("--feature-generator", run.feature_generator, "policy or backend")
        ->check(CLI::IsMember({"policy", "backend"}));
    run_cmd->add_option("--dedupe-metric", run.dedupe_metric, "overlap or iou")
        ->check(CLI::IsMember({"overlap", "iou"}));
    run_cmd->add_flag("--record-wall-time", run.record_wall_time, "store per-case wall time in the report");

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train-reward", "train the reward scorer on KB descriptions");
    add_kb_options(train_cmd, train.kb);
    train_cmd->add_option("--task", train.task)->check(CLI::IsMember({"htp", "emotion"}));
    train_cmd->add_option("--out", train.out, "scorer path")->required();
    train_cmd->add_option("--epochs", train.epochs);
    train_cmd->add_option("--lr", train.lr)->check(CLI::PositiveNumber);

    std::vector<std::string> report_paths;
    std::string eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "recompute metrics from run reports");
    eval_cmd->add_option("--reports", report_paths, "one or more report files")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--out", eval_out, "metrics path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitFatal;
    }

    try {
        if (*run_cmd) {
            if (run.vocab.empty() && run.policy_in.empty() &&
                run.feature_generator == "policy" && run.n_dynamic > 0) {
                throw pick::ValidationError("--vocab is required unless --policy-in is given");
            }
            return run_command(run);
        }
        if (*train_cmd) return train_command(train);
        return eval_command(report_paths, eval_out);
    } catch (const std::exception& e) {
        std::cerr << "pick: " << e.what() << "\n";
        return kExitFatal;
    }
}
