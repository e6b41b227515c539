// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "pick/embedder.hpp"
#include "pick/fusion.hpp"
#include "pick/knowledge_base.hpp"
#include "pick/reward_model.hpp"
#include "pipeline_support.hpp"

namespace {

using namespace pick;

KnowledgeBase synthetic_kb(std::size_t n, const Embedder& embedder) {
    std::mt19937_64 rng(1);
    const std::vector<std::string> words{"house", "tree", "person", "dark", "small", "roof", "branch",
                                         "window", "smile", "tall", "broken", "open", "heavy", "line"};
    std::vector<TripletSource> sources;
    for (std::size_t i = 0; i < n; ++i) {
        std::string head;
        for (int w = 0; w < 8; ++w) head += words[rng() % words.size()] + " ";
        sources.push_back({head, "suggests", "t", std::vector<double>{0.5, 0.5}});
    }
    return build_knowledge_base(sources, Lexicon(binary_class_names()), embedder, binary_class_names());
}

void BM_Embed(benchmark::State& state) {
    const HashedTrigramEmbedder embedder;
    for (auto _ : state) benchmark::DoNotOptimize(embedder.embed("a tree with bare broken branches and roots"));
}
BENCHMARK(BM_Embed);

void BM_Retrieve(benchmark::State& state) {
    const HashedTrigramEmbedder embedder;
    const auto kb = synthetic_kb(static_cast<std::size_t>(state.range(0)), embedder);
    const auto query = embedder.embed("a dark house with a broken window");
    for (auto _ : state) benchmark::DoNotOptimize(retrieve_by_vector(kb, query, 3));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Retrieve)->Arg(1000)->Arg(5000);

void BM_Fuse(benchmark::State& state) {
    const EmotionDistribution a(binary_class_names(), {0.8, 0.2});
    const EmotionDistribution b(binary_class_names(), {0.3, 0.7});
    for (auto _ : state) benchmark::DoNotOptimize(fuse_feature(a, 0.7, b, 0.4));
}
BENCHMARK(BM_Fuse);

void BM_TrainScorer(benchmark::State& state) {
    const HashedTrigramEmbedder embedder;
    const auto kb = ingest_kb(testing::fixture("kb.jsonl"), testing::fixture("lexicon.json"), embedder);
    const auto examples = testing::FixtureWorld::examples(kb);
    for (auto _ : state) benchmark::DoNotOptimize(train_scorer(examples));
}
BENCHMARK(BM_TrainScorer)->Unit(benchmark::kMillisecond);

void BM_MockCorpus(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(testing::run_fixture_corpus(7, static_cast<std::size_t>(state.range(0))));
    }
}
BENCHMARK(BM_MockCorpus)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
