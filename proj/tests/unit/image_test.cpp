// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <fstream>

#include "pick/errors.hpp"
#include "pick/image.hpp"
#include "test_support.hpp"

namespace pick {
namespace {

bool is_green(const Image& img, int x, int y) {
    const auto* p = img.pixel(x, y);
    return p[0] == 0 && p[1] == 255 && p[2] == 0;
}

bool is_white(const Image& img, int x, int y) {
    const auto* p = img.pixel(x, y);
    return p[0] == 255 && p[1] == 255 && p[2] == 255;
}

TEST(Annotate, PerimeterIsGreenInteriorUntouched) {
    const Image white(100, 100);
    const Image out = annotate_focus(white, {10, 10, 50, 50});
    for (int t = 10; t <= 50; ++t) {
        EXPECT_TRUE(is_green(out, t, 10));
        EXPECT_TRUE(is_green(out, t, 50));
        EXPECT_TRUE(is_green(out, 10, t));
        EXPECT_TRUE(is_green(out, 50, t));
    }
    EXPECT_TRUE(is_green(out, 12, 30));
    EXPECT_TRUE(is_white(out, 13, 30));
    EXPECT_TRUE(is_white(out, 30, 30));
    EXPECT_TRUE(is_white(out, 9, 9));
    EXPECT_TRUE(is_white(out, 51, 30));
    EXPECT_TRUE(is_white(white, 10, 10)) << "input must not be modified";
}

TEST(Annotate, ClampsToImage) {
    EXPECT_EQ(clamp_to_image({90, 90, 120, 120}, 100, 100), (PixelRect{90, 90, 99, 99}));
    const Image out = annotate_focus(Image(100, 100), {90, 90, 120, 120});
    EXPECT_TRUE(is_green(out, 99, 99));
    EXPECT_TRUE(is_green(out, 90, 95));
    EXPECT_TRUE(is_white(out, 94, 94));
}

TEST(Annotate, Deterministic) {
    Image img(64, 48);
    for (std::size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = static_cast<std::uint8_t>(i * 7);
    const auto a = encode_png(annotate_focus(img, {3.5, 4.2, 40.1, 30.9}));
    const auto b = encode_png(annotate_focus(img, {3.5, 4.2, 40.1, 30.9}));
    EXPECT_EQ(a, b);
}

TEST(ImageIo, PngRoundTrip) {
    testing::TempDir dir("img");
    Image img(17, 9);
    for (std::size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = static_cast<std::uint8_t>(i * 13 + 1);
    save_png(img, dir / "x.png");
    EXPECT_EQ(load_image(dir / "x.png"), img);
}

TEST(ImageIo, LoadsFixtureDrawing) {
    const Image img = load_image(testing::fixture("drawings/d1.png"));
    EXPECT_EQ(img.width, 256);
    EXPECT_EQ(img.height, 256);
}

TEST(ImageIo, UnreadableImageIsAnError) {
    testing::TempDir dir("img");
    std::ofstream(dir / "bad.png") << "not an image";
    EXPECT_THROW(load_image(dir / "bad.png"), ImageError);
    EXPECT_THROW(load_image(dir / "missing.png"), ImageError);
}

}  // namespace
}  // namespace pick
