// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pick/distribution.hpp"

namespace pick {

/// Natural-log entropy with 0 log 0 = 0.
double entropy(std::span<const double> probs) noexcept;
double entropy(const EmotionDistribution& dist) noexcept;

/// entropy / ln K, in [0, 1].
double normalized_entropy(const EmotionDistribution& dist) noexcept;

/// Emotion-preference reward 1 - H(p)/ln K. Sharper distributions score higher.
double reward_score(const EmotionDistribution& dist) noexcept;

/// KL(target || predicted), natural log. Terms with target_k = 0 contribute 0.
double kl_divergence(std::span<const double> target, std::span<const double> predicted) noexcept;

inline constexpr std::size_t kFeatureBuckets = 4096;

/// Sparse (bucket, count) pairs sorted by bucket.
using SparseFeatures = std::vector<std::pair<std::uint32_t, double>>;

std::uint32_t token_bucket(std::string_view token, std::size_t buckets = kFeatureBuckets) noexcept;

/// Lowercased whitespace tokens hashed into buckets and counted.
SparseFeatures featurize(std::string_view text, std::size_t buckets = kFeatureBuckets);

struct TrainingMeta {
    std::size_t epochs = 0;
    double learning_rate = 0.0;
    double initial_loss = 0.0;
    double final_loss = 0.0;

    friend bool operator==(const TrainingMeta&, const TrainingMeta&) = default;
};

/// Linear softmax model over hashed bag-of-words features.
class TextScorer {
public:
    TextScorer(std::size_t buckets, std::vector<std::string> class_names);

    std::size_t buckets() const noexcept { return buckets_; }
    std::size_t class_count() const noexcept { return class_names_.size(); }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }

    /// Row-major buckets x K.
    std::vector<double>& weights() noexcept { return weights_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::vector<double>& bias() noexcept { return bias_; }
    const std::vector<double>& bias() const noexcept { return bias_; }
    double& weight(std::size_t bucket, std::size_t k) { return weights_[bucket * class_count() + k]; }
    double weight(std::size_t bucket, std::size_t k) const { return weights_[bucket * class_count() + k]; }

    TrainingMeta& meta() noexcept { return meta_; }
    const TrainingMeta& meta() const noexcept { return meta_; }

    std::vector<double> logits(const SparseFeatures& features) const;
    std::vector<double> predict(const SparseFeatures& features) const;
    EmotionDistribution score_text(std::string_view text) const;

    std::string to_json() const;
    static TextScorer from_json(std::string_view json_text);
    void save(const std::filesystem::path& path) const;
    static TextScorer load(const std::filesystem::path& path);

    friend bool operator==(const TextScorer&, const TextScorer&) = default;

private:
    std::size_t buckets_;
    std::vector<std::string> class_names_;
    std::vector<double> weights_;
    std::vector<double> bias_;
    TrainingMeta meta_;
};

EmotionDistribution score_text(const TextScorer& scorer, std::string_view text);

struct TrainingExample {
    std::string text;
    EmotionDistribution target;
};

struct FeaturizedExample {
    SparseFeatures features;
    std::vector<double> target;
};

struct TrainerConfig {
    double learning_rate = 0.1;
    std::size_t epochs = 200;
    std::size_t buckets = kFeatureBuckets;
};

struct ScorerGradient {
    std::vector<double> weights;
    std::vector<double> bias;
};

std::vector<FeaturizedExample> featurize_dataset(std::span<const TrainingExample> dataset, std::size_t buckets);

/// Mean KL(target || softmax(Wx + b)) over the dataset.
double mean_kl_loss(const TextScorer& scorer, std::span<const FeaturizedExample> data);

/// Analytic gradient of mean_kl_loss; d loss / d logits = predicted - target per example.
ScorerGradient loss_gradient(const TextScorer& scorer, std::span<const FeaturizedExample> data);

/// Full-batch gradient descent from zero initialisation.
TextScorer train_scorer(std::span<const TrainingExample> dataset, const TrainerConfig& config = {});

}  // namespace pick
