// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pick/errors.hpp"

namespace pick {

EmotionDistribution::EmotionDistribution(std::vector<std::string> class_names, std::vector<double> probs,
                                         double tolerance)
    : class_names_(std::move(class_names)), probs_(std::move(probs)) {
    if (class_names_.size() < 2) {
        throw ValidationError("distribution needs at least 2 classes, got " +
                              std::to_string(class_names_.size()));
    }
    if (class_names_.size() != probs_.size()) {
        throw ValidationError("distribution has " + std::to_string(probs_.size()) + " probabilities for " +
                              std::to_string(class_names_.size()) + " classes");
    }
    double sum = 0.0;
    for (double p : probs_) {
        if (!std::isfinite(p) || p < 0.0) {
            throw ValidationError("distribution entry must be finite and non-negative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > tolerance) {
        throw ValidationError("distribution sums to " + std::to_string(sum) + ", expected 1");
    }
}

EmotionDistribution EmotionDistribution::uniform(std::vector<std::string> class_names) {
    const std::size_t k = class_names.size();
    if (k < 2) {
        throw ValidationError("distribution needs at least 2 classes");
    }
    return EmotionDistribution(std::move(class_names), std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

EmotionDistribution EmotionDistribution::normalized(std::vector<std::string> class_names,
                                                    std::vector<double> weights) {
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw ValidationError("cannot normalize negative or non-finite weight");
        }
        sum += w;
    }
    if (sum <= 0.0) {
        throw ValidationError("cannot normalize all-zero weights");
    }
    for (double& w : weights) {
        w /= sum;
    }
    return EmotionDistribution(std::move(class_names), std::move(weights));
}

std::size_t EmotionDistribution::argmax() const noexcept { return argmax_index(probs_); }

std::vector<std::string> binary_class_names() { return {"Positive", "Negative"}; }

std::size_t argmax_index(std::span<const double> values) noexcept {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) {
            best = i;
        }
    }
    return best;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.begin(), logits.end());
    if (out.empty()) {
        return out;
    }
    const double peak = *std::max_element(out.begin(), out.end());
    double sum = 0.0;
    for (double& v : out) {
        v = std::exp(v - peak);
        sum += v;
    }
    for (double& v : out) {
        v /= sum;
    }
    return out;
}

}  // namespace pick
