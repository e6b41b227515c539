// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pick {

/// Probability vector over an ordered set of named classes.
///
/// Construction validates: at least two classes, names and probabilities of
/// equal length, finite non-negative entries summing to 1 within `tolerance`.
class EmotionDistribution {
public:
    static constexpr double kSumTolerance = 1e-9;

    EmotionDistribution(std::vector<std::string> class_names, std::vector<double> probs,
                        double tolerance = kSumTolerance);

    static EmotionDistribution uniform(std::vector<std::string> class_names);
    /// Scales non-negative `weights` to sum to one.
    static EmotionDistribution normalized(std::vector<std::string> class_names, std::vector<double> weights);

    std::size_t size() const noexcept { return probs_.size(); }
    const std::vector<double>& probs() const noexcept { return probs_; }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }
    double operator[](std::size_t i) const { return probs_[i]; }

    /// Index of the largest probability; first index wins exact ties.
    std::size_t argmax() const noexcept;
    const std::string& argmax_label() const { return class_names_[argmax()]; }

    bool same_classes(const EmotionDistribution& other) const noexcept {
        return class_names_ == other.class_names_;
    }

    friend bool operator==(const EmotionDistribution&, const EmotionDistribution&) = default;

private:
    std::vector<std::string> class_names_;
    std::vector<double> probs_;
};

/// The binary label set used for House-Tree-Person tasks.
std::vector<std::string> binary_class_names();

/// Index of the largest value, first index on ties.
std::size_t argmax_index(std::span<const double> values) noexcept;

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

}  // namespace pick
