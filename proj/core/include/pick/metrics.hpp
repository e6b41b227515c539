// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pick {

struct ClassMetrics {
    std::string name;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;

    friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct MetricsReport {
    std::vector<std::string> class_names;
    double accuracy = 0.0;
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    /// confusion[gold][predicted]
    std::vector<std::vector<std::size_t>> confusion;
    std::size_t total = 0;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

using LabelPair = std::pair<std::string, std::string>;  // (gold, predicted)

/// Confusion-matrix metrics. Zero denominators give 0.
MetricsReport compute_metrics(std::span<const LabelPair> pairs, const std::vector<std::string>& class_names);

}  // namespace pick
