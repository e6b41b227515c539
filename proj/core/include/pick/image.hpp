// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pick/geometry.hpp"

namespace pick {

/// 8-bit interleaved RGB bitmap.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h, std::uint8_t fill = 255);

    std::uint8_t* pixel(int x, int y) { return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t* pixel(int x, int y) const {
        return rgb.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    friend bool operator==(const Image&, const Image&) = default;
};

/// Inclusive pixel rectangle.
struct PixelRect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

inline constexpr int kFocusStroke = 3;
inline constexpr std::uint8_t kFocusColor[3] = {0, 255, 0};

/// Maps box edges to pixel indices: floor(min)..ceil(max), clamped into the image.
PixelRect clamp_to_image(const BoundingBox& box, int width, int height);

/// Copy of `image` with a green 3-pixel rectangle drawn inside the box edge.
Image annotate_focus(const Image& image, const BoundingBox& box);

/// Decodes PNG or JPEG (sniffed from the signature).
Image decode_image(std::span<const std::uint8_t> bytes);
Image load_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const Image& image);
void save_png(const Image& image, const std::filesystem::path& path);

}  // namespace pick
