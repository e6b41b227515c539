// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "pick/errors.hpp"
#include "pick/geometry.hpp"
#include "test_support.hpp"

namespace pick {
namespace {

Detection det(const std::string& label, double x0, double y0, double x1, double y1) {
    return make_detection(label, {x0, y0, x1, y1}, 0.9);
}

// Containment ratio computed from first principles.
double oracle_overlap(const BoundingBox& a, const BoundingBox& b) {
    const double w = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
    const double h = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
    const double smaller = std::min((a.x_max - a.x_min) * (a.y_max - a.y_min), (b.x_max - b.x_min) * (b.y_max - b.y_min));
    return w * h / smaller;
}

TEST(Detections, ParsesSingleMainRecord) {
    const auto d = parse_detections(R"([{"label": "house", "box": [10, 10, 60, 80], "score": 0.92}])");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_TRUE(d[0].is_main);
    EXPECT_EQ(d[0].box, (BoundingBox{10, 10, 60, 80}));
    EXPECT_DOUBLE_EQ(d[0].score, 0.92);
}

TEST(Detections, SunIsNotMain) {
    const auto d = parse_detections(R"([{"label": "sun", "box": [0, 0, 5, 5], "score": 0.5}])");
    EXPECT_FALSE(d[0].is_main);
    EXPECT_TRUE(is_main_category("Tree"));
    EXPECT_TRUE(is_main_category(" PERSON "));
    EXPECT_FALSE(is_main_category("flower"));
}

TEST(Detections, ZeroWidthBoxNamesIndex) {
    try {
        parse_detections(R"([{"label": "tree", "box": [1, 1, 2, 2], "score": 0.5},
                            {"label": "house", "box": [50, 50, 50, 90], "score": 0.5}])");
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("detection 1"), std::string::npos) << e.what();
    }
}

TEST(Detections, MalformedJsonNamesLine) {
    try {
        parse_detections("[\n{\"label\": \"tree\",\n \"box\": [1, 1, 2, 2]\n,,]");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(Detections, RejectsBadScoresAndNegativeCoordinates) {
    EXPECT_THROW(parse_detections(R"([{"label": "tree", "box": [1, 1, 2, 2], "score": 1.5}])"), ValidationError);
    EXPECT_THROW(parse_detections(R"([{"label": "tree", "box": [-1, 1, 2, 2], "score": 0.5}])"), ValidationError);
    EXPECT_THROW(parse_detections(R"({"label": "tree"})"), ParseError);
}

TEST(Detections, LoadsFixtureFile) {
    const auto d = load_detections(testing::fixture("drawings/d1.json"));
    EXPECT_EQ(d.size(), 5u);
    EXPECT_EQ(std::count_if(d.begin(), d.end(), [](const Detection& x) { return x.is_main; }), 3);
    EXPECT_THROW(load_detections(testing::fixture("does_not_exist.json")), ParseError);
}

TEST(Overlap, SpecExamples) {
    EXPECT_DOUBLE_EQ(overlap_over_smaller({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
    EXPECT_DOUBLE_EQ(overlap_over_smaller({0, 0, 10, 10}, {20, 20, 30, 30}), 0.0);
    EXPECT_DOUBLE_EQ(overlap_over_smaller({0, 0, 10, 10}, {5, 0, 15, 10}), 0.5);
    EXPECT_DOUBLE_EQ(intersection_over_union({0, 0, 10, 10}, {5, 0, 15, 10}), 50.0 / 150.0);
}

TEST(Overlap, SymmetricBoundedAndOneOnContainment) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int i = 0; i < 2000; ++i) {
        const double ax = u(rng), ay = u(rng), bx = u(rng), by = u(rng);
        const BoundingBox a{ax, ay, ax + 1 + u(rng), ay + 1 + u(rng)};
        const BoundingBox b{bx, by, bx + 1 + u(rng), by + 1 + u(rng)};
        const double ab = overlap_over_smaller(a, b);
        EXPECT_DOUBLE_EQ(ab, overlap_over_smaller(b, a));
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
        EXPECT_NEAR(ab, oracle_overlap(a, b), 1e-12);
        const BoundingBox u_box = union_box(std::vector<BoundingBox>{a, b});
        EXPECT_TRUE(u_box.contains(a));
        EXPECT_TRUE(u_box.contains(b));
        EXPECT_DOUBLE_EQ(overlap_over_smaller(u_box, a), 1.0);
    }
}

TEST(SingleViews, NoNeighborWhenDisjoint) {
    const std::vector<Detection> mains{det("house", 0, 0, 10, 10)};
    const std::vector<Detection> others{det("sun", 50, 50, 60, 60)};
    const auto v = build_single_object_views(mains, others, "img");
    ASSERT_EQ(v.size(), 1u);
    EXPECT_TRUE(v[0].neighbor_labels.empty());
    EXPECT_EQ(v[0].main_object_labels, std::vector<std::string>{"house"});
    EXPECT_EQ(v[0].source_image_id, "img");
}

TEST(SingleViews, IntersectingNeighborIncluded) {
    const std::vector<Detection> mains{det("tree", 0, 0, 50, 50)};
    const std::vector<Detection> others{det("flower", 40, 40, 60, 60), det("sun", 50, 0, 70, 20)};
    const auto v = build_single_object_views(mains, others, "img");
    EXPECT_EQ(v[0].neighbor_labels, std::vector<std::string>{"flower"});
}

TEST(SingleViews, ThreeMainsGiveThreeViews) {
    const std::vector<Detection> mains{det("house", 0, 0, 10, 10), det("person", 20, 0, 30, 10),
                                       det("tree", 40, 0, 50, 10)};
    EXPECT_EQ(build_single_object_views(mains, {}, "img").size(), 3u);
}

TEST(SingleViews, NoMainsIsAnError) {
    try {
        build_single_object_views({}, {}, "img");
        FAIL();
    } catch (const DecompositionError& e) {
        EXPECT_STREQ(e.what(), "no main objects detected");
    }
}

TEST(MultiViews, PairUnion) {
    const std::vector<Detection> mains{det("house", 0, 0, 10, 10), det("tree", 20, 0, 30, 10)};
    const auto v = build_multi_object_views(mains, "img");
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(*v[0].focus_box, (BoundingBox{0, 0, 30, 10}));
    EXPECT_EQ(v[0].main_object_labels, (std::vector<std::string>{"house", "tree"}));
}

TEST(MultiViews, SingleMainGivesNone) {
    EXPECT_TRUE(build_multi_object_views(std::vector<Detection>{det("house", 0, 0, 10, 10)}, "img").empty());
}

TEST(MultiViews, AllMainsGroupFirstAndContainedPairsDropped) {
    // House and tree nearly span the drawing; the person sits inside their union.
    const std::vector<Detection> mains{det("house", 0, 0, 50, 100), det("person", 45, 40, 55, 60),
                                       det("tree", 50, 0, 100, 95)};
    const auto v = build_multi_object_views(mains, "img");
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].main_object_labels.size(), 3u);
    EXPECT_EQ(*v[0].focus_box, (BoundingBox{0, 0, 100, 100}));
}

TEST(MultiViews, IouMetricKeepsDistinctPairs) {
    const std::vector<Detection> mains{det("house", 0, 0, 10, 10), det("person", 100, 0, 110, 10),
                                       det("tree", 200, 0, 210, 10)};
    DecomposeOptions opts;
    opts.metric = DedupeMetric::kIoU;
    const auto v = build_multi_object_views(mains, "img", opts);
    // all + (house,person) + (house,tree) + (person,tree); (house,tree) has IoU 1 with all.
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0].main_object_labels.size(), 3u);
    EXPECT_EQ(v[1].main_object_labels, (std::vector<std::string>{"house", "person"}));
    EXPECT_EQ(v[2].main_object_labels, (std::vector<std::string>{"person", "tree"}));
}

TEST(Dedupe, MatchesPairwiseOracleAndIsIdempotent) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<BoundingBox> boxes;
        const int n = 2 + static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            const double x = u(rng), y = u(rng);
            boxes.push_back({x, y, x + 5 + u(rng), y + 5 + u(rng)});
            if (rng() % 3 == 0) {
                const auto& b = boxes.back();
                boxes.push_back({b.x_min + 0.1, b.y_min + 0.1, b.x_max, b.y_max});
            }
        }
        std::vector<std::vector<double>> m(boxes.size(), std::vector<double>(boxes.size()));
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            for (std::size_t j = 0; j < boxes.size(); ++j) m[i][j] = oracle_overlap(boxes[i], boxes[j]);
        }
        std::vector<std::size_t> expected;
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            bool drop = false;
            for (std::size_t j : expected) drop = drop || m[i][j] > 0.9;
            if (!drop) expected.push_back(i);
        }
        const auto kept = dedupe_boxes(boxes);
        ASSERT_EQ(kept, expected);

        std::vector<BoundingBox> again;
        for (auto i : kept) again.push_back(boxes[i]);
        const auto kept2 = dedupe_boxes(again);
        EXPECT_EQ(kept2.size(), again.size());
    }
}

TEST(Decompose, CountsAndWholeView) {
    const auto r = decompose(load_detections(testing::fixture("drawings/d1.json")), "d1");
    EXPECT_EQ(r.singles.size(), 3u);
    EXPECT_EQ(r.whole.level, ViewLevel::kWhole);
    EXPECT_FALSE(r.whole.focus_box.has_value());
    EXPECT_TRUE(r.whole.neighbor_labels.empty());
    for (const auto& m : r.multis) {
        EXPECT_GE(m.main_object_labels.size(), 2u);
    }
}

TEST(Decompose, InputOrderDoesNotMatter) {
    auto d = load_detections(testing::fixture("drawings/d5.json"));
    const auto base = decompose(d, "d5");
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(d.begin(), d.end(), rng);
        EXPECT_EQ(decompose(d, "d5"), base);
    }
}

TEST(ViewLevelNames, RoundTrip) {
    for (auto l : {ViewLevel::kSingleObject, ViewLevel::kMultiObject, ViewLevel::kWhole}) {
        EXPECT_EQ(view_level_from_string(to_string(l)), l);
    }
    EXPECT_THROW(view_level_from_string("other"), ValidationError);
}

}  // namespace
}  // namespace pick
