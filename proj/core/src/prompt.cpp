// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/prompt.hpp"

#include <algorithm>

#include <json.hpp>

#include "pick/errors.hpp"
#include "text_util.hpp"

namespace pick {

namespace {

constexpr std::string_view kWholePredictText =
    "As an emotional psychologist, analyze the all the objects in the sketch drawing and focus on the overall "
    "composition, such as layout, use of space, shadow, brushstrokes, symbolism, or other visual characteristics. "
    "Determine the underlying emotional distribution of {class_list}. Follow this exact output format: "
    "{output_format}";

constexpr std::string_view kMobjPredictText =
    "As an emotional psychologist, analyze the relationship and interations between all the objects depicted "
    "within the green bounding box in the sketch drawing. Determine the underlying emotional distribution of "
    "{class_list}. Follow this exact output format: {output_format}";

constexpr std::string_view kSobjCaptionText =
    "Acting as a emotional psychologist, provide a concise and complete sentence description of the {object} "
    "depicted within the green bounding box in the sketch drawing. Think carefully and the sentence should focus "
    "on the following: {attribute}, and should not involve any emotional words. The output structure must be "
    "exactly the following: Description: xxx";

constexpr std::string_view kSobjPredictText =
    "As an emotional psychologist, analyze the following: 1. the image, 2. this attribute about the object in the "
    "bounding box: {attribute} 3. this description based on the image and attribute: {text}. Determine the "
    "underlying emotional distribution of {class_list}. And assign a confidence score (a float from 0 to 1, "
    "where 0 means no confidence and 1 means full confidence) indicating certainty in the emotional "
    "interpretation. Follow this exact output format: {output_format}; Confidence: x.xx";

constexpr std::string_view kFeatureGenText =
    "Given the provided hand-drawn sketch, focus on the object {object} in the green bounding box. Identify one "
    "detailed visual attribute of this object that contributes to understanding psychological positive or "
    "negative emotions. Avoid mentioning these attributes: {excluded_features} and Color. Be specific and "
    "provide ONLY a short phrase.";

bool is_slot_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

/// Finds the next `{name}` slot at or after `from`; returns npos when none.
std::size_t find_slot(std::string_view text, std::size_t from, std::size_t& end) {
    for (std::size_t i = text.find('{', from); i != std::string_view::npos; i = text.find('{', i + 1)) {
        std::size_t j = i + 1;
        while (j < text.size() && is_slot_char(text[j])) ++j;
        if (j > i + 1 && j < text.size() && text[j] == '}') {
            end = j + 1;
            return i;
        }
    }
    return std::string_view::npos;
}

}  // namespace

std::string_view to_string(TemplateId id) noexcept {
    switch (id) {
        case TemplateId::kWholePredict: return "whole_predict";
        case TemplateId::kMobjPredict: return "mobj_predict";
        case TemplateId::kSobjCaption: return "sobj_caption";
        case TemplateId::kSobjPredict: return "sobj_predict";
        case TemplateId::kFeatureGen: return "feature_gen";
    }
    return "whole_predict";
}

std::string_view to_string(Role role) noexcept {
    switch (role) {
        case Role::kCaptioner: return "captioner";
        case Role::kPsyPredictor: return "psy_predictor";
        case Role::kFeatureGenerator: return "feature_generator";
    }
    return "captioner";
}

TemplateId template_id_from_string(std::string_view name) {
    for (TemplateId id : kAllTemplates) {
        if (to_string(id) == name) return id;
    }
    throw ValidationError("unknown prompt template '" + std::string(name) + "'");
}

Role role_of(TemplateId id) noexcept {
    switch (id) {
        case TemplateId::kSobjCaption: return Role::kCaptioner;
        case TemplateId::kFeatureGen: return Role::kFeatureGenerator;
        default: return Role::kPsyPredictor;
    }
}

OutputShape output_shape_of(TemplateId id) noexcept {
    switch (id) {
        case TemplateId::kSobjCaption: return OutputShape::kCaption;
        case TemplateId::kFeatureGen: return OutputShape::kPhrase;
        case TemplateId::kSobjPredict: return OutputShape::kDistributionWithConfidence;
        default: return OutputShape::kDistribution;
    }
}

std::vector<std::string> PromptTemplate::slots() const {
    std::vector<std::string> out;
    std::size_t end = 0;
    for (std::size_t i = find_slot(text, 0, end); i != std::string_view::npos; i = find_slot(text, end, end)) {
        std::string name = text.substr(i + 1, end - i - 2);
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    }
    return out;
}

std::string render_template(std::string_view text, const SlotMap& slots) {
    std::string out;
    out.reserve(text.size() + 64);
    std::size_t pos = 0;
    std::size_t end = 0;
    for (std::size_t i = find_slot(text, 0, end); i != std::string_view::npos; i = find_slot(text, pos, end)) {
        out.append(text.substr(pos, i - pos));
        const std::string name(text.substr(i + 1, end - i - 2));
        const auto it = slots.find(name);
        if (it == slots.end()) {
            throw TemplateError("missing value for prompt slot '" + name + "'", name);
        }
        out += it->second;
        pos = end;
    }
    out.append(text.substr(pos));
    return out;
}

std::string class_list_phrase(const std::vector<std::string>& class_names) {
    if (class_names.size() == 2) {
        return class_names[0] + " and " + class_names[1] + " class";
    }
    std::string out;
    for (std::size_t i = 0; i < class_names.size(); ++i) {
        if (i) out += i + 1 == class_names.size() ? ", and " : ", ";
        out += class_names[i];
    }
    return out + " classes";
}

std::string output_format_phrase(const std::vector<std::string>& class_names) {
    std::string out = "{";
    for (std::size_t i = 0; i < class_names.size(); ++i) {
        if (i) out += "; ";
        out += class_names[i] + ": x.xx";
    }
    return out + "}";
}

TemplateSet::TemplateSet(std::vector<std::string> class_names) : class_names_(std::move(class_names)) {
    if (class_names_.size() < 2) {
        throw ValidationError("prompt templates need at least two classes");
    }
    set(TemplateId::kWholePredict, std::string(kWholePredictText));
    set(TemplateId::kMobjPredict, std::string(kMobjPredictText));
    set(TemplateId::kSobjCaption, std::string(kSobjCaptionText));
    set(TemplateId::kSobjPredict, std::string(kSobjPredictText));
    set(TemplateId::kFeatureGen, std::string(kFeatureGenText));
}

TemplateSet TemplateSet::from_json(std::string_view json_text, std::vector<std::string> class_names) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed template JSON: ") + e.what(),
                         detail::line_of_offset(json_text, e.byte));
    }
    if (!doc.is_object()) {
        throw ParseError("template file must be a JSON object", 1);
    }
    TemplateSet set(std::move(class_names));
    for (const auto& [name, text] : doc.items()) {
        if (!text.is_string()) throw ValidationError("template '" + name + "' must be a string");
        set.set(template_id_from_string(name), text.get<std::string>());
    }
    return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path, std::vector<std::string> class_names) {
    return from_json(detail::read_file(path.string()), std::move(class_names));
}

const PromptTemplate& TemplateSet::get(TemplateId id) const { return templates_.at(id); }

void TemplateSet::set(TemplateId id, std::string text) { templates_.insert_or_assign(id, PromptTemplate{id, std::move(text)}); }

std::string TemplateSet::render(TemplateId id, const SlotMap& slots) const {
    SlotMap all = slots;
    all.try_emplace("class_list", class_list_phrase(class_names_));
    all.try_emplace("output_format", output_format_phrase(class_names_));
    return render_template(get(id).text, all);
}

std::string render_prompt(const TemplateSet& templates, TemplateId id, const SlotMap& slots) {
    return templates.render(id, slots);
}

}  // namespace pick
