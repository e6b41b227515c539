// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pick/errors.hpp"
#include "text_util.hpp"

namespace pick {

void validate_box(const BoundingBox& box) {
    const std::array<double, 4> coords{box.x_min, box.y_min, box.x_max, box.y_max};
    for (double c : coords) {
        if (!std::isfinite(c) || c < 0.0) {
            throw ValidationError("box coordinates must be finite and non-negative");
        }
    }
    if (box.x_min >= box.x_max) {
        throw ValidationError("degenerate box: x_min >= x_max");
    }
    if (box.y_min >= box.y_max) {
        throw ValidationError("degenerate box: y_min >= y_max");
    }
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept {
    const double w = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double h = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (w <= 0.0 || h <= 0.0) {
        return 0.0;
    }
    return w * h;
}

double overlap_over_smaller(const BoundingBox& a, const BoundingBox& b) noexcept {
    const double smaller = std::min(a.area(), b.area());
    if (smaller <= 0.0) {
        return 0.0;
    }
    return std::clamp(intersection_area(a, b) / smaller, 0.0, 1.0);
}

double intersection_over_union(const BoundingBox& a, const BoundingBox& b) noexcept {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) {
        return 0.0;
    }
    return std::clamp(inter / uni, 0.0, 1.0);
}

BoundingBox union_box(std::span<const BoundingBox> boxes) {
    if (boxes.empty()) {
        throw ValidationError("union of zero boxes");
    }
    BoundingBox out = boxes.front();
    for (const auto& b : boxes.subspan(1)) {
        out.x_min = std::min(out.x_min, b.x_min);
        out.y_min = std::min(out.y_min, b.y_min);
        out.x_max = std::max(out.x_max, b.x_max);
        out.y_max = std::max(out.y_max, b.y_max);
    }
    return out;
}

bool is_main_category(std::string_view label) {
    const std::string lower = detail::to_lower(detail::trim(label));
    return lower == "house" || lower == "tree" || lower == "person";
}

Detection make_detection(std::string label, const BoundingBox& box, double score) {
    validate_box(box);
    if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
        throw ValidationError("detection score must lie in [0, 1]");
    }
    const bool main = is_main_category(label);
    return Detection{box, std::move(label), score, main};
}

std::vector<Detection> parse_detections(std::string_view json_text, std::string_view source) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("malformed detections JSON in " + std::string(source) + ": " + e.what(),
                         detail::line_of_offset(json_text, e.byte));
    }
    if (!doc.is_array()) {
        throw ParseError("detections JSON in " + std::string(source) + " must be an array", 1);
    }
    std::vector<Detection> out;
    out.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& rec = doc[i];
        const std::string where = "detection " + std::to_string(i) + " in " + std::string(source);
        try {
            if (!rec.is_object() || !rec.contains("label") || !rec.contains("box")) {
                throw ValidationError("missing label or box");
            }
            const auto& box = rec.at("box");
            if (!box.is_array() || box.size() != 4) {
                throw ValidationError("box must be [x_min, y_min, x_max, y_max]");
            }
            BoundingBox b{box[0].get<double>(), box[1].get<double>(), box[2].get<double>(), box[3].get<double>()};
            const double score = rec.contains("score") ? rec.at("score").get<double>() : 1.0;
            out.push_back(make_detection(rec.at("label").get<std::string>(), b, score));
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    return out;
}

std::vector<Detection> load_detections(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open detections file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_detections(buf.str(), path.string());
}

void sort_detections(std::vector<Detection>& detections) {
    std::stable_sort(detections.begin(), detections.end(), [](const Detection& a, const Detection& b) {
        const std::string la = detail::to_lower(a.label);
        const std::string lb = detail::to_lower(b.label);
        if (la != lb) return la < lb;
        if (a.box.x_min != b.box.x_min) return a.box.x_min < b.box.x_min;
        return a.box.y_min < b.box.y_min;
    });
}

std::string_view to_string(ViewLevel level) noexcept {
    switch (level) {
        case ViewLevel::kSingleObject: return "single_object";
        case ViewLevel::kMultiObject: return "multi_object";
        case ViewLevel::kWhole: return "whole";
    }
    return "whole";
}

ViewLevel view_level_from_string(std::string_view name) {
    if (name == "single_object") return ViewLevel::kSingleObject;
    if (name == "multi_object") return ViewLevel::kMultiObject;
    if (name == "whole") return ViewLevel::kWhole;
    throw ValidationError("unknown view level '" + std::string(name) + "'");
}

double box_overlap(const BoundingBox& a, const BoundingBox& b, DedupeMetric metric) noexcept {
    return metric == DedupeMetric::kIoU ? intersection_over_union(a, b) : overlap_over_smaller(a, b);
}

std::vector<std::size_t> dedupe_boxes(std::span<const BoundingBox> boxes, const DecomposeOptions& options) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](std::size_t j) {
            return box_overlap(boxes[i], boxes[j], options.metric) > options.dedupe_threshold;
        });
        if (!duplicate) {
            kept.push_back(i);
        }
    }
    return kept;
}

std::vector<SubDrawing> build_single_object_views(std::span<const Detection> mains,
                                                  std::span<const Detection> others,
                                                  std::string_view image_id) {
    if (mains.empty()) {
        throw DecompositionError("no main objects detected");
    }
    std::vector<SubDrawing> views;
    views.reserve(mains.size());
    for (const auto& main : mains) {
        SubDrawing view;
        view.level = ViewLevel::kSingleObject;
        view.focus_box = main.box;
        view.main_object_labels = {main.label};
        for (const auto& other : others) {
            if (intersection_area(main.box, other.box) > 0.0) {
                view.neighbor_labels.push_back(other.label);
            }
        }
        view.source_image_id = std::string(image_id);
        views.push_back(std::move(view));
    }
    return views;
}

std::vector<SubDrawing> build_multi_object_views(std::span<const Detection> mains, std::string_view image_id,
                                                 const DecomposeOptions& options) {
    std::vector<std::vector<std::size_t>> groups;
    if (mains.size() >= 3) {
        std::vector<std::size_t> all(mains.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        groups.push_back(std::move(all));
    }
    for (std::size_t i = 0; i < mains.size(); ++i) {
        for (std::size_t j = i + 1; j < mains.size(); ++j) {
            groups.push_back({i, j});
        }
    }

    std::vector<BoundingBox> boxes;
    boxes.reserve(groups.size());
    for (const auto& g : groups) {
        std::vector<BoundingBox> members;
        for (std::size_t idx : g) members.push_back(mains[idx].box);
        boxes.push_back(union_box(members));
    }

    std::vector<SubDrawing> views;
    for (std::size_t kept : dedupe_boxes(boxes, options)) {
        SubDrawing view;
        view.level = ViewLevel::kMultiObject;
        view.focus_box = boxes[kept];
        for (std::size_t idx : groups[kept]) view.main_object_labels.push_back(mains[idx].label);
        view.source_image_id = std::string(image_id);
        views.push_back(std::move(view));
    }
    return views;
}

DecompositionResult decompose(std::vector<Detection> detections, std::string_view image_id,
                              const DecomposeOptions& options) {
    sort_detections(detections);
    std::vector<Detection> mains;
    std::vector<Detection> others;
    for (auto& d : detections) {
        (d.is_main ? mains : others).push_back(std::move(d));
    }

    DecompositionResult result;
    result.singles = build_single_object_views(mains, others, image_id);
    result.multis = build_multi_object_views(mains, image_id, options);
    result.whole.level = ViewLevel::kWhole;
    for (const auto& m : mains) result.whole.main_object_labels.push_back(m.label);
    result.whole.source_image_id = std::string(image_id);
    return result;
}

}  // namespace pick
