// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pick/distribution.hpp"

namespace pick {

struct ParsedDistribution {
    std::vector<double> probs;
    std::optional<double> confidence;
};

/// Extracts `Name: value` for every class (case-insensitive). Sums within
/// [0.9, 1.1] are renormalized; confidence is clamped to [0, 1]. Throws
/// ResponseParseError on a missing class, a negative value, an out-of-band
/// sum, or a missing confidence when one is requested.
ParsedDistribution parse_distribution(std::string_view text, bool with_confidence,
                                      std::span<const std::string> class_names);

/// Two-decimal rendering in the prompt's output format.
std::string format_distribution(const EmotionDistribution& dist, std::optional<double> confidence = std::nullopt);

/// Text following "Description:"; throws ResponseParseError when absent or empty.
std::string parse_caption(std::string_view text);

/// First non-empty line with quotes, list markers and trailing punctuation stripped.
std::string parse_phrase(std::string_view text);

}  // namespace pick
