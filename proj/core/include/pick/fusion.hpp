// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pick/distribution.hpp"
#include "pick/geometry.hpp"

namespace pick {

/// Confidence-weighted blend of the model and knowledge-base distributions:
/// (e^c * P_mllm + e^s * P_kb) / (e^c + e^s).
EmotionDistribution fuse_feature(const EmotionDistribution& mllm, double confidence, const EmotionDistribution& kb,
                                 double similarity);

/// Evidence for one feature of one single-object view.
struct FeatureEvidence {
    std::string feature;
    std::string description;
    EmotionDistribution mllm;
    double confidence = 0.0;
    EmotionDistribution kb;
    double similarity = 0.0;
    EmotionDistribution fused;
    std::string kb_head;
    std::string kb_tail;

    friend bool operator==(const FeatureEvidence&, const FeatureEvidence&) = default;
};

/// Arithmetic mean; throws AggregationError on an empty span.
EmotionDistribution average_distributions(std::span<const EmotionDistribution> dists);

/// Mean of the fused distributions of a view's features.
EmotionDistribution aggregate_subdrawing(std::span<const FeatureEvidence> evidences);

enum class WeightingVariant {
    kHtp,      ///< w_l proportional to n_l * (1 - H_l / ln K)
    kEmotion,  ///< w_l proportional to (1 - H_l / ln K)
};

struct LevelSummary {
    ViewLevel level = ViewLevel::kWhole;
    std::vector<EmotionDistribution> sub_distributions;
    std::optional<EmotionDistribution> averaged;
    std::size_t count = 0;
    double weight = 0.0;

    friend bool operator==(const LevelSummary&, const LevelSummary&) = default;
};

/// Averages a level's view distributions; an empty level has count 0 and no average.
LevelSummary summarize_level(ViewLevel level, std::vector<EmotionDistribution> distributions);

/// Normalized level weights. Levels with count 0 get 0; if every numerator is
/// 0 the weights are uniform over present levels.
std::vector<double> level_weights(std::span<const LevelSummary> summaries, WeightingVariant variant);

struct FinalPrediction {
    EmotionDistribution distribution;
    std::string label;
    std::size_t label_index = 0;
    std::vector<LevelSummary> levels;
};

/// P_final = sum_l w_l P_l and its argmax label (first index on ties).
FinalPrediction final_prediction(std::vector<LevelSummary> summaries, std::span<const double> weights);

}  // namespace pick
