// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pick/backend.hpp"
#include "pick/embedder.hpp"
#include "pick/feature_policy.hpp"
#include "pick/fusion.hpp"
#include "pick/geometry.hpp"
#include "pick/image.hpp"
#include "pick/knowledge_base.hpp"
#include "pick/report.hpp"
#include "pick/reward_model.hpp"

namespace pick {

enum class Task { kHtp, kEmotion };

std::string_view to_string(Task task) noexcept;
Task task_from_string(std::string_view name);

/// One manifest entry. Paths are resolved against the manifest directory.
struct Case {
    std::string id;
    std::filesystem::path image;
    std::optional<std::filesystem::path> detections;
    std::optional<std::string> label;
};

/// Parses manifest JSONL `{"id","image","detections","label"}`. Throws ParseError
/// with the line number on malformed lines, missing fields or duplicate ids.
std::vector<Case> parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                                 std::string_view source = "<memory>");
std::vector<Case> load_manifest(const std::filesystem::path& path);

enum class FeatureGeneratorMode {
    kPolicy,   ///< categorical policy adapted with group-relative updates
    kBackend,  ///< free-form phrases from the feature_gen prompt, no adaptation
};

struct PipelineConfig {
    Task task = Task::kHtp;
    std::vector<std::string> class_names = binary_class_names();
    std::vector<std::string> generic_features = {"size", "position"};
    std::size_t n_dynamic = 2;
    AdaptationConfig adaptation;
    FeatureGeneratorMode feature_generator = FeatureGeneratorMode::kPolicy;
    DecomposeOptions decompose;
    std::size_t case_concurrency = 2;
    bool record_wall_time = false;
    std::optional<std::filesystem::path> annotated_dir;
    std::uint64_t seed = 0;

    /// Task defaults: HTP uses size/position generic features and count
    /// weighting; emotion uses no generic features and drops the counts.
    static PipelineConfig for_task(Task task, std::vector<std::string> class_names);

    WeightingVariant weighting() const noexcept {
        return task == Task::kHtp ? WeightingVariant::kHtp : WeightingVariant::kEmotion;
    }
};

/// Supplies detections for a case without a detections file. `image` is
/// null when the image could not be loaded.
using Detector = std::function<std::vector<Detection>(const Case&, const Image* image)>;

/// Detector backed by `POST {"image_id", "image_base64"} -> detections-JSON`.
Detector make_http_detector(std::string endpoint, std::chrono::milliseconds timeout);

struct PipelineResources {
    BackendGateway& gateway;
    const KnowledgeBase& kb;
    const Embedder& embedder;
    const TextScorer& scorer;
    FeaturePolicy& policy;
    Detector detector;
};

/// Runs every case: decompose, single-object analysis with adapted features and
/// KB fusion, multi-object and whole predictions, level weighting, final label.
/// Cases are reported in id order; failing cases are marked errored and left
/// out of the metrics.
RunReport run_corpus(std::vector<Case> cases, const PipelineConfig& config, PipelineResources& resources);

}  // namespace pick
