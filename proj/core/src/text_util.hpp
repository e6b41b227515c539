// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pick::detail {

std::string to_lower(std::string_view text);
std::string_view trim(std::string_view text) noexcept;
std::vector<std::string> split_whitespace(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// 1-based line number containing byte `offset` (clamped to the text).
std::size_t line_of_offset(std::string_view text, std::size_t offset) noexcept;

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

std::string read_file(const std::string& path);

std::string base64_encode(std::string_view bytes);

}  // namespace pick::detail
