// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pick/fusion.hpp"
#include "pick/geometry.hpp"
#include "pick/metrics.hpp"

namespace pick {

struct SubDrawingReport {
    ViewLevel level = ViewLevel::kWhole;
    std::optional<BoundingBox> focus_box;
    std::vector<std::string> main_object_labels;
    std::vector<std::string> neighbor_labels;
    /// Generic plus dynamic features (single-object views only).
    std::vector<std::string> features;
    std::vector<FeatureEvidence> evidence;
    std::optional<EmotionDistribution> distribution;

    friend bool operator==(const SubDrawingReport&, const SubDrawingReport&) = default;
};

struct LevelReport {
    ViewLevel level = ViewLevel::kWhole;
    std::size_t count = 0;
    std::optional<EmotionDistribution> averaged;
    double weight = 0.0;

    friend bool operator==(const LevelReport&, const LevelReport&) = default;
};

struct CaseTiming {
    std::size_t backend_calls = 0;
    std::size_t backend_attempts = 0;
    std::optional<double> wall_seconds;

    friend bool operator==(const CaseTiming&, const CaseTiming&) = default;
};

struct CaseReport {
    std::string id;
    bool errored = false;
    std::string error;
    std::optional<std::string> gold_label;
    std::optional<std::string> predicted_label;
    std::optional<EmotionDistribution> final_distribution;
    std::vector<LevelReport> levels;
    std::vector<SubDrawingReport> sub_drawings;
    CaseTiming timing;

    friend bool operator==(const CaseReport&, const CaseReport&) = default;
};

struct RunReport {
    std::string task;
    std::vector<std::string> class_names;
    std::uint64_t seed = 0;
    std::vector<CaseReport> cases;
    std::size_t errored_count = 0;
    std::optional<MetricsReport> metrics;

    friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Metrics over successful cases that carry a gold label; nullopt when there are none.
std::optional<MetricsReport> metrics_for_cases(const std::vector<CaseReport>& cases,
                                               const std::vector<std::string>& class_names);

/// Deterministic JSON (sorted keys, two-space indent).
std::string to_json(const RunReport& report);
RunReport parse_run_report(std::string_view json_text);
RunReport load_run_report(const std::filesystem::path& path);

std::string to_json(const MetricsReport& metrics);
MetricsReport parse_metrics_report(std::string_view json_text);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace pick
