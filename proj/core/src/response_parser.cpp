// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/response_parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "pick/errors.hpp"
#include "text_util.hpp"

namespace pick {

namespace {

constexpr double kSumLow = 0.9;
constexpr double kSumHigh = 1.1;

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

/// Finds `name` (case-insensitive, whole word) followed by optional spaces,
/// ':' and a number. Returns the parsed number.
std::optional<double> find_labeled_number(std::string_view text, std::string_view name) {
    const std::string lower_text = detail::to_lower(text);
    const std::string lower_name = detail::to_lower(name);
    for (std::size_t at = lower_text.find(lower_name); at != std::string::npos;
         at = lower_text.find(lower_name, at + 1)) {
        if (at > 0 && is_word_char(lower_text[at - 1])) continue;
        std::size_t i = at + lower_name.size();
        if (i < lower_text.size() && is_word_char(lower_text[i]) && is_word_char(lower_name.back())) continue;
        while (i < lower_text.size() && (lower_text[i] == ' ' || lower_text[i] == '\t')) ++i;
        if (i >= lower_text.size() || lower_text[i] != ':') continue;
        ++i;
        while (i < lower_text.size() && (lower_text[i] == ' ' || lower_text[i] == '\t')) ++i;
        std::size_t j = i;
        if (j < lower_text.size() && (lower_text[j] == '-' || lower_text[j] == '+')) ++j;
        while (j < lower_text.size() && (std::isdigit(static_cast<unsigned char>(lower_text[j])) || lower_text[j] == '.')) ++j;
        if (j == i) continue;
        const std::string number = lower_text.substr(i, j - i);
        char* end = nullptr;
        const double value = std::strtod(number.c_str(), &end);
        if (end == number.c_str() || !std::isfinite(value)) continue;
        return value;
    }
    return std::nullopt;
}

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

ParsedDistribution parse_distribution(std::string_view text, bool with_confidence,
                                      std::span<const std::string> class_names) {
    if (class_names.size() < 2) {
        throw ValidationError("parse_distribution needs at least two classes");
    }
    ParsedDistribution out;
    out.probs.reserve(class_names.size());
    for (const auto& name : class_names) {
        const auto value = find_labeled_number(text, name);
        if (!value) {
            throw ResponseParseError("response has no value for class '" + name + "'");
        }
        if (*value < 0.0) {
            throw ResponseParseError("response has a negative value for class '" + name + "'");
        }
        out.probs.push_back(*value);
    }
    double sum = 0.0;
    for (double p : out.probs) sum += p;
    if (sum < kSumLow || sum > kSumHigh) {
        throw ResponseParseError("response probabilities sum to " + detail::format_double(sum) +
                                 ", outside [0.9, 1.1]");
    }
    for (double& p : out.probs) p /= sum;

    if (with_confidence) {
        const auto c = find_labeled_number(text, "Confidence");
        if (!c) {
            throw ResponseParseError("response has no confidence score");
        }
        out.confidence = std::clamp(*c, 0.0, 1.0);
    }
    return out;
}

std::string format_distribution(const EmotionDistribution& dist, std::optional<double> confidence) {
    std::string out = "{";
    for (std::size_t i = 0; i < dist.size(); ++i) {
        if (i) out += "; ";
        out += dist.class_names()[i] + ": " + two_decimals(dist[i]);
    }
    out += "}";
    if (confidence) {
        out += "; Confidence: " + two_decimals(std::clamp(*confidence, 0.0, 1.0));
    }
    return out;
}

std::string parse_caption(std::string_view text) {
    const std::string lower = detail::to_lower(text);
    const auto at = lower.find("description:");
    if (at == std::string::npos) {
        throw ResponseParseError("caption response lacks 'Description:'");
    }
    std::string_view rest = text.substr(at + std::string_view("description:").size());
    rest = detail::trim(rest);
    if (rest.empty()) {
        throw ResponseParseError("caption response has an empty description");
    }
    return std::string(rest);
}

std::string parse_phrase(std::string_view text) {
    std::string_view line;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        line = detail::trim(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
        if (!line.empty()) break;
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    const auto strip_front = [](std::string_view s) {
        while (!s.empty() && (s.front() == '"' || s.front() == '\'' || s.front() == '-' || s.front() == '*' ||
                              s.front() == ' ')) {
            s.remove_prefix(1);
        }
        return s;
    };
    const auto strip_back = [](std::string_view s) {
        while (!s.empty() && (s.back() == '"' || s.back() == '\'' || s.back() == '.' || s.back() == ' ')) {
            s.remove_suffix(1);
        }
        return s;
    };
    line = strip_back(strip_front(line));
    if (line.empty()) {
        throw ResponseParseError("feature response is empty");
    }
    return std::string(line);
}

}  // namespace pick
