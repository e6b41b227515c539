// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pick {

/// Axis-aligned box in image pixel coordinates, origin top-left.
struct BoundingBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const noexcept { return x_max - x_min; }
    double height() const noexcept { return y_max - y_min; }
    double area() const noexcept { return width() * height(); }
    bool contains(const BoundingBox& other) const noexcept {
        return x_min <= other.x_min && y_min <= other.y_min && x_max >= other.x_max && y_max >= other.y_max;
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Throws ValidationError unless the box is finite, non-negative and non-degenerate.
void validate_box(const BoundingBox& box);

double intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Intersection area divided by the area of the smaller box; 0 when disjoint.
double overlap_over_smaller(const BoundingBox& a, const BoundingBox& b) noexcept;

double intersection_over_union(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Tight box around all inputs. Requires a non-empty span.
BoundingBox union_box(std::span<const BoundingBox> boxes);

/// True for house, tree and person (case-insensitive).
bool is_main_category(std::string_view label);

struct Detection {
    BoundingBox box;
    std::string label;
    double score = 1.0;
    bool is_main = false;

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// Validates the box and score and derives `is_main` from the label.
Detection make_detection(std::string label, const BoundingBox& box, double score);

/// Parses detections-JSON text. `source` names the input in error messages.
std::vector<Detection> parse_detections(std::string_view json_text, std::string_view source = "<memory>");
std::vector<Detection> load_detections(const std::filesystem::path& path);

/// Orders by (lowercased label, x_min, y_min); stable for remaining ties.
void sort_detections(std::vector<Detection>& detections);

enum class ViewLevel { kSingleObject, kMultiObject, kWhole };

std::string_view to_string(ViewLevel level) noexcept;
ViewLevel view_level_from_string(std::string_view name);

struct SubDrawing {
    ViewLevel level = ViewLevel::kWhole;
    std::optional<BoundingBox> focus_box;
    std::vector<std::string> main_object_labels;
    std::vector<std::string> neighbor_labels;
    std::string source_image_id;

    friend bool operator==(const SubDrawing&, const SubDrawing&) = default;
};

struct DecompositionResult {
    std::vector<SubDrawing> singles;
    std::vector<SubDrawing> multis;
    SubDrawing whole;

    friend bool operator==(const DecompositionResult&, const DecompositionResult&) = default;
};

enum class DedupeMetric { kOverlapOverSmaller, kIoU };

struct DecomposeOptions {
    double dedupe_threshold = 0.9;
    DedupeMetric metric = DedupeMetric::kOverlapOverSmaller;
};

double box_overlap(const BoundingBox& a, const BoundingBox& b, DedupeMetric metric) noexcept;

/// Indices of the boxes kept by greedy first-wins dedupe: a box is dropped when
/// its overlap with any already-kept box exceeds the threshold.
std::vector<std::size_t> dedupe_boxes(std::span<const BoundingBox> boxes, const DecomposeOptions& options = {});

std::vector<SubDrawing> build_single_object_views(std::span<const Detection> mains,
                                                  std::span<const Detection> others,
                                                  std::string_view image_id);

/// Candidate groups are the all-mains group (when there are three or more
/// mains) followed by every pair in sorted order; groups are then deduped.
std::vector<SubDrawing> build_multi_object_views(std::span<const Detection> mains, std::string_view image_id,
                                                 const DecomposeOptions& options = {});

/// Full three-level decomposition. Input order does not matter.
DecompositionResult decompose(std::vector<Detection> detections, std::string_view image_id,
                              const DecomposeOptions& options = {});

}  // namespace pick
