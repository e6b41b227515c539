// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pick/pipeline.hpp"
#include "test_support.hpp"

namespace pick::testing {

/// Everything run_corpus needs, built from the fixture files.
struct FixtureWorld {
    std::vector<std::string> classes = binary_class_names();
    HashedTrigramEmbedder embedder;
    KnowledgeBase kb;
    TextScorer scorer;
    FeaturePolicy policy;
    BackendGateway gateway;

    explicit FixtureWorld(std::uint64_t seed, std::shared_ptr<Backend> backend = nullptr)
        : kb(ingest_kb(fixture("kb.jsonl"), fixture("lexicon.json"), embedder)),
          scorer(train_scorer(examples(kb))),
          policy(FeatureVocabulary::load(fixture("vocab.json")), seed),
          gateway(backend ? backend : std::make_shared<MockBackend>(seed, binary_class_names()),
                  TemplateSet(binary_class_names())) {}

    static std::vector<TrainingExample> examples(const KnowledgeBase& kb) {
        std::vector<TrainingExample> out;
        for (const auto& r : kb.records()) out.push_back({r.head, r.soft_label});
        return out;
    }

    PipelineResources resources() { return PipelineResources{gateway, kb, embedder, scorer, policy, {}}; }
};

inline RunReport run_fixture_corpus(std::uint64_t seed, std::size_t concurrency = 2) {
    FixtureWorld world(seed);
    auto config = PipelineConfig::for_task(Task::kHtp, binary_class_names());
    config.seed = seed;
    config.case_concurrency = concurrency;
    auto res = world.resources();
    return run_corpus(load_manifest(fixture("manifest.jsonl")), config, res);
}

}  // namespace pick::testing
