// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pick/geometry.hpp"
#include "pick/reward_model.hpp"

namespace pick {

/// Candidate attribute phrases per object category.
class FeatureVocabulary {
public:
    static constexpr std::size_t kMinPhrases = 4;
    /// Category used when a label has no entry of its own.
    static constexpr std::string_view kFallbackCategory = "default";

    FeatureVocabulary() = default;
    explicit FeatureVocabulary(std::map<std::string, std::vector<std::string>> phrases);

    static FeatureVocabulary parse(std::string_view json_text);
    static FeatureVocabulary load(const std::filesystem::path& path);

    /// Resolves a detection label (case-insensitive) to its vocabulary key.
    std::string category_for(std::string_view label) const;
    const std::vector<std::string>& phrases(std::string_view category) const;
    const std::map<std::string, std::vector<std::string>>& all() const noexcept { return phrases_; }

private:
    std::map<std::string, std::vector<std::string>> phrases_;
};

using ExcludedSet = std::set<std::string>;

/// Categorical logits per object category plus the sampling RNG.
class FeaturePolicy {
public:
    FeaturePolicy(FeatureVocabulary vocabulary, std::uint64_t seed, double learning_rate = 0.1);

    const FeatureVocabulary& vocabulary() const noexcept { return vocabulary_; }
    std::uint64_t seed() const noexcept { return seed_; }
    double learning_rate() const noexcept { return learning_rate_; }

    std::vector<double>& logits(std::string_view category);
    const std::vector<double>& logits(std::string_view category) const;

    /// Softmax over the phrases not in `excluded`; excluded entries get 0.
    std::vector<double> probabilities(std::string_view category, const ExcludedSet& excluded) const;

    /// Highest-probability non-excluded phrase; first index on ties.
    std::size_t argmax(std::string_view category, const ExcludedSet& excluded) const;

    std::mt19937_64& rng() noexcept { return rng_; }

    std::string to_json() const;
    static FeaturePolicy from_json(std::string_view json_text);
    void save(const std::filesystem::path& path) const;
    static FeaturePolicy load(const std::filesystem::path& path);

private:
    FeatureVocabulary vocabulary_;
    std::map<std::string, std::vector<double>> logits_;
    std::uint64_t seed_;
    double learning_rate_;
    std::mt19937_64 rng_;
};

struct FeatureCandidate {
    std::string category;
    std::string phrase;
    std::size_t index = 0;
    double policy_prob = 0.0;
    double reward = 0.0;
    double advantage = 0.0;
};

/// G independent draws from the policy renormalized over non-excluded phrases.
std::vector<FeatureCandidate> sample_group(const FeaturePolicy& policy, std::string_view category,
                                           std::size_t group_size, const ExcludedSet& excluded,
                                           std::mt19937_64& rng);

/// (r_i - mean) / (population std + 1e-8).
std::vector<double> group_advantages(std::span<const double> rewards);

/// logits += lr * A * (onehot(a) - softmax) for each candidate in order,
/// restricted to the non-excluded support.
void policy_update(FeaturePolicy& policy, std::string_view category, std::span<const FeatureCandidate> candidates,
                   const ExcludedSet& excluded, double learning_rate);

struct AdaptationConfig {
    std::size_t group_size = 4;
    double learning_rate = 0.1;
    std::size_t slot_budget = 200;
};

/// Produces the caption text for a candidate phrase on a sub-drawing.
using Captioner = std::function<std::string(const SubDrawing&, const std::string& phrase)>;

/// Test-time adaptation loop: for each of `n_dynamic` slots, run `slot_budget`
/// rounds of sample -> caption -> reward -> advantages -> update, then commit
/// the argmax phrase and exclude it from later slots.
std::vector<std::string> extract_features(const SubDrawing& view, std::size_t n_dynamic, FeaturePolicy& policy,
                                          const Captioner& captioner, const TextScorer& scorer,
                                          const ExcludedSet& excluded_init, const AdaptationConfig& config = {});

}  // namespace pick
