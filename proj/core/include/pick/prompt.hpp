// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pick {

enum class TemplateId { kWholePredict, kMobjPredict, kSobjCaption, kSobjPredict, kFeatureGen };

inline constexpr std::array<TemplateId, 5> kAllTemplates = {TemplateId::kWholePredict, TemplateId::kMobjPredict,
                                                            TemplateId::kSobjCaption, TemplateId::kSobjPredict,
                                                            TemplateId::kFeatureGen};

enum class Role { kCaptioner, kPsyPredictor, kFeatureGenerator };

enum class OutputShape { kDistribution, kDistributionWithConfidence, kCaption, kPhrase };

std::string_view to_string(TemplateId id) noexcept;
std::string_view to_string(Role role) noexcept;
TemplateId template_id_from_string(std::string_view name);

Role role_of(TemplateId id) noexcept;
OutputShape output_shape_of(TemplateId id) noexcept;

using SlotMap = std::map<std::string, std::string>;

struct PromptTemplate {
    TemplateId id;
    std::string text;

    Role role() const noexcept { return role_of(id); }
    OutputShape expected_output_shape() const noexcept { return output_shape_of(id); }
    /// Slot names (`{name}` with name in [a-z_]) in order of first appearance.
    std::vector<std::string> slots() const;
};

/// Single-pass substitution of `{name}` slots. Braces that do not enclose a
/// lowercase identifier are literal text. Throws TemplateError for a slot
/// without a value.
std::string render_template(std::string_view text, const SlotMap& slots);

/// "A and B class" for two classes, "A, B, and C classes" otherwise.
std::string class_list_phrase(const std::vector<std::string>& class_names);

/// "{A: x.xx; B: x.xx}".
std::string output_format_phrase(const std::vector<std::string>& class_names);

/// The five prompt templates for one label set. The class-dependent slots
/// `{class_list}` and `{output_format}` are filled automatically.
class TemplateSet {
public:
    explicit TemplateSet(std::vector<std::string> class_names);

    /// Defaults overridden by a JSON object `{template_id: text}`.
    static TemplateSet from_json(std::string_view json_text, std::vector<std::string> class_names);
    static TemplateSet load(const std::filesystem::path& path, std::vector<std::string> class_names);

    const PromptTemplate& get(TemplateId id) const;
    void set(TemplateId id, std::string text);
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }

    std::string render(TemplateId id, const SlotMap& slots) const;

private:
    std::vector<std::string> class_names_;
    std::map<TemplateId, PromptTemplate> templates_;
};

std::string render_prompt(const TemplateSet& templates, TemplateId id, const SlotMap& slots);

}  // namespace pick
