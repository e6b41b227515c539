// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "pick/errors.hpp"
#include "pick/reward_model.hpp"

namespace pick {

namespace {

constexpr double kRangeSlack = 1e-9;

void require_same_classes(const EmotionDistribution& a, const EmotionDistribution& b, const char* what) {
    if (a.size() != b.size()) {
        throw ValidationError(std::string(what) + ": class count mismatch (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    }
    if (!a.same_classes(b)) {
        throw ValidationError(std::string(what) + ": distributions use different class names");
    }
}

double checked_unit(double v, double lo, double hi, const char* name) {
    if (!std::isfinite(v) || v < lo - kRangeSlack || v > hi + kRangeSlack) {
        throw ValidationError(std::string(name) + " out of range");
    }
    return std::clamp(v, lo, hi);
}

}  // namespace

EmotionDistribution fuse_feature(const EmotionDistribution& mllm, double confidence, const EmotionDistribution& kb,
                                 double similarity) {
    require_same_classes(mllm, kb, "fuse_feature");
    const double c = checked_unit(confidence, 0.0, 1.0, "confidence");
    const double s = checked_unit(similarity, -1.0, 1.0, "similarity");
    const double wc = std::exp(c);
    const double ws = std::exp(s);
    const double denom = wc + ws;
    std::vector<double> out(mllm.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = (wc * mllm[k] + ws * kb[k]) / denom;
    }
    return EmotionDistribution(mllm.class_names(), std::move(out));
}

EmotionDistribution average_distributions(std::span<const EmotionDistribution> dists) {
    if (dists.empty()) {
        throw AggregationError("cannot average zero distributions");
    }
    std::vector<double> sum(dists.front().size(), 0.0);
    for (const auto& d : dists) {
        require_same_classes(dists.front(), d, "average");
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += d[k];
    }
    const double n = static_cast<double>(dists.size());
    for (double& v : sum) v /= n;
    return EmotionDistribution(dists.front().class_names(), std::move(sum));
}

EmotionDistribution aggregate_subdrawing(std::span<const FeatureEvidence> evidences) {
    if (evidences.empty()) {
        throw AggregationError("sub-drawing has no feature evidence");
    }
    std::vector<EmotionDistribution> fused;
    fused.reserve(evidences.size());
    for (const auto& e : evidences) fused.push_back(e.fused);
    return average_distributions(fused);
}

LevelSummary summarize_level(ViewLevel level, std::vector<EmotionDistribution> distributions) {
    LevelSummary s;
    s.level = level;
    s.count = distributions.size();
    if (!distributions.empty()) s.averaged = average_distributions(distributions);
    s.sub_distributions = std::move(distributions);
    return s;
}

std::vector<double> level_weights(std::span<const LevelSummary> summaries, WeightingVariant variant) {
    std::vector<double> numer(summaries.size(), 0.0);
    std::size_t present = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto& s = summaries[i];
        if (s.count == 0 || !s.averaged) continue;
        ++present;
        const double certainty = 1.0 - normalized_entropy(*s.averaged);
        const double n = variant == WeightingVariant::kHtp ? static_cast<double>(s.count) : 1.0;
        numer[i] = n * certainty;
        total += numer[i];
    }
    if (present == 0) {
        throw AggregationError("no level has any sub-drawing");
    }
    std::vector<double> w(summaries.size(), 0.0);
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        if (summaries[i].count == 0 || !summaries[i].averaged) continue;
        w[i] = total > 0.0 ? numer[i] / total : 1.0 / static_cast<double>(present);
    }
    return w;
}

FinalPrediction final_prediction(std::vector<LevelSummary> summaries, std::span<const double> weights) {
    if (summaries.size() != weights.size()) {
        throw ValidationError("one weight per level required");
    }
    const EmotionDistribution* reference = nullptr;
    for (const auto& s : summaries) {
        if (s.averaged) {
            reference = &*s.averaged;
            break;
        }
    }
    if (!reference) {
        throw AggregationError("no level has any sub-drawing");
    }
    std::vector<double> combined(reference->size(), 0.0);
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        summaries[i].weight = weights[i];
        if (!summaries[i].averaged || weights[i] == 0.0) continue;
        require_same_classes(*reference, *summaries[i].averaged, "final_prediction");
        for (std::size_t k = 0; k < combined.size(); ++k) combined[k] += weights[i] * (*summaries[i].averaged)[k];
    }
    EmotionDistribution dist = EmotionDistribution::normalized(reference->class_names(), std::move(combined));
    const std::size_t idx = dist.argmax();
    std::string label = dist.class_names()[idx];
    return FinalPrediction{std::move(dist), std::move(label), idx, std::move(summaries)};
}

}  // namespace pick
