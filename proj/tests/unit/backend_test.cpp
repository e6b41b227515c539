// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <mutex>
#include <random>
#include <regex>
#include <thread>

#include "pick/backend.hpp"
#include "pick/errors.hpp"
#include "pick/prompt.hpp"
#include "pick/response_parser.hpp"
#include "test_support.hpp"

namespace pick {
namespace {

const std::vector<std::string> kBinary = binary_class_names();

bool has_unfilled_slot(const std::string& text) { return std::regex_search(text, std::regex(R"(\{[a-z_]+\})")); }

TEST(Prompt, CaptionMentionsObjectAndAttribute) {
    const TemplateSet t(kBinary);
    const auto text = t.render(TemplateId::kSobjCaption, {{"object", "house"}, {"attribute", "roof slope"}});
    EXPECT_NE(text.find("house"), std::string::npos);
    EXPECT_NE(text.find("roof slope"), std::string::npos);
    EXPECT_TRUE(text.ends_with("Description: xxx"));
    EXPECT_FALSE(has_unfilled_slot(text));
}

TEST(Prompt, FeatureGenExcludedList) {
    const TemplateSet t(kBinary);
    const auto text =
        t.render(TemplateId::kFeatureGen, {{"object", "tree"}, {"excluded_features", "size, position"}});
    EXPECT_NE(text.find("Avoid mentioning these attributes: size, position and Color"), std::string::npos);
}

TEST(Prompt, WholePredictIsVerbatimBinaryText) {
    const TemplateSet t(kBinary);
    EXPECT_EQ(t.render(TemplateId::kWholePredict, {}),
              "As an emotional psychologist, analyze the all the objects in the sketch drawing and focus on the "
              "overall composition, such as layout, use of space, shadow, brushstrokes, symbolism, or other visual "
              "characteristics. Determine the underlying emotional distribution of Positive and Negative class. "
              "Follow this exact output format: {Positive: x.xx; Negative: x.xx}");
}

TEST(Prompt, PredictFormatStringsEndAsDocumented) {
    const TemplateSet t(kBinary);
    EXPECT_TRUE(t.render(TemplateId::kSobjPredict, {{"attribute", "a"}, {"text", "b"}})
                    .ends_with("{Positive: x.xx; Negative: x.xx}; Confidence: x.xx"));
    EXPECT_TRUE(t.render(TemplateId::kMobjPredict, {}).ends_with("{Positive: x.xx; Negative: x.xx}"));
}

TEST(Prompt, MissingSlotNamesIt) {
    const TemplateSet t(kBinary);
    try {
        t.render(TemplateId::kSobjCaption, {{"object", "house"}});
        FAIL();
    } catch (const TemplateError& e) {
        EXPECT_EQ(e.slot(), "attribute");
    }
}

TEST(Prompt, SlotValuesAreNotReexpanded) {
    EXPECT_EQ(render_template("a {x} b", {{"x", "{y}"}}), "a {y} b");
    EXPECT_EQ(render_template("{Positive: x.xx}", {}), "{Positive: x.xx}");
}

TEST(Prompt, KClassGeneralization) {
    const std::vector<std::string> names{"joy", "fear", "anger"};
    const TemplateSet t(names);
    const auto text = t.render(TemplateId::kMobjPredict, {});
    EXPECT_NE(text.find("of joy, fear, and anger classes"), std::string::npos);
    EXPECT_TRUE(text.ends_with("{joy: x.xx; fear: x.xx; anger: x.xx}"));
}

TEST(Prompt, OverridesFromJson) {
    const auto t = TemplateSet::from_json(R"({"whole_predict": "Rate {class_list}: {output_format}"})", kBinary);
    EXPECT_EQ(t.render(TemplateId::kWholePredict, {}),
              "Rate Positive and Negative class: {Positive: x.xx; Negative: x.xx}");
    EXPECT_THROW(TemplateSet::from_json(R"({"nope": "x"})", kBinary), ValidationError);
    for (auto id : kAllTemplates) EXPECT_EQ(template_id_from_string(to_string(id)), id);
}

TEST(Parser, DocumentedExamples) {
    const auto a = parse_distribution("{Positive: 0.70; Negative: 0.30}; Confidence: 0.85", true, kBinary);
    EXPECT_NEAR(a.probs[0], 0.7, 1e-12);
    EXPECT_NEAR(a.probs[1], 0.3, 1e-12);
    EXPECT_DOUBLE_EQ(*a.confidence, 0.85);
    EXPECT_THROW(parse_distribution("{Positive: 0.60; Negative: 0.60}", false, kBinary), ResponseParseError);
    const auto c = parse_distribution("{Positive: 0.52; Negative: 0.50}", false, kBinary);
    EXPECT_NEAR(c.probs[0], 0.509804, 1e-6);
    EXPECT_NEAR(c.probs[1], 0.490196, 1e-6);
}

TEST(Parser, Tolerance) {
    const auto a = parse_distribution("Sure! negative: 0.4, POSITIVE : 0.6", false, kBinary);
    EXPECT_NEAR(a.probs[0], 0.6, 1e-12);
    EXPECT_THROW(parse_distribution("{Positive: 0.7}", false, kBinary), ResponseParseError);
    EXPECT_THROW(parse_distribution("{Positive: 1.2; Negative: -0.2}", false, kBinary), ResponseParseError);
    EXPECT_THROW(parse_distribution("no numbers here", false, kBinary), ResponseParseError);
    EXPECT_THROW(parse_distribution("{Positive: 0.7; Negative: 0.3}", true, kBinary), ResponseParseError);
    EXPECT_THROW(parse_distribution("{Nonpositive: 0.7; Negative: 0.3}", false, kBinary), ResponseParseError);
    EXPECT_DOUBLE_EQ(*parse_distribution("{Positive: 0.7; Negative: 0.3}; Confidence: 1.4", true, kBinary).confidence,
                     1.0);
}

TEST(Parser, FormatRoundTrip) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 500; ++i) {
        const std::size_t k = 2 + i % 4;
        const auto d = testing::random_distribution(k, rng);
        const double c = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto text = format_distribution(d, c);
        const auto back = parse_distribution(text, true, d.class_names());
        for (std::size_t j = 0; j < k; ++j) EXPECT_NEAR(back.probs[j], d[j], 0.005 * (1 + k));
        EXPECT_NEAR(*back.confidence, c, 0.005);
    }
    EXPECT_EQ(format_distribution(EmotionDistribution(kBinary, {0.7, 0.3}), 0.85),
              "{Positive: 0.70; Negative: 0.30}; Confidence: 0.85");
}

TEST(Parser, CaptionAndPhrase) {
    EXPECT_EQ(parse_caption("Description: A small house."), "A small house.");
    EXPECT_EQ(parse_caption("Here you go.\ndescription:   tall tree  "), "tall tree");
    EXPECT_THROW(parse_caption("A small house."), ResponseParseError);
    EXPECT_THROW(parse_caption("Description:   "), ResponseParseError);
    EXPECT_EQ(parse_phrase("\n  window shape \nmore"), "window shape");
    EXPECT_THROW(parse_phrase("  \n "), ResponseParseError);
}

TEST(Mock, Deterministic) {
    auto a = std::make_shared<MockBackend>(7, kBinary);
    auto b = std::make_shared<MockBackend>(7, kBinary);
    BackendGateway ga(a, TemplateSet(kBinary));
    BackendGateway gb(b, TemplateSet(kBinary));
    const ImageRef img{"d1|whole|full", std::nullopt};
    for (auto id : kAllTemplates) {
        const SlotMap slots{{"object", "house"}, {"attribute", "size"}, {"text", "x"}, {"excluded_features", "size"}};
        EXPECT_EQ(ga.query(id, slots, &img), gb.query(id, slots, &img));
    }
    const SlotMap s{{"attribute", "size"}, {"text", "x"}};
    const ImageRef other{"d2|whole|full", std::nullopt};
    EXPECT_NE(ga.query(TemplateId::kSobjPredict, s, &img).raw_text,
              BackendGateway(std::make_shared<MockBackend>(8, kBinary), TemplateSet(kBinary))
                  .query(TemplateId::kSobjPredict, s, &img)
                  .raw_text);
    (void)other;
}

TEST(Mock, OutputsAlwaysParse) {
    for (std::size_t k : {2u, 3u, 6u}) {
        const auto names = testing::class_names(k);
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            BackendGateway g(std::make_shared<MockBackend>(seed, names), TemplateSet(names), {1});
            const ImageRef img{"img" + std::to_string(seed % 7), std::nullopt};
            const auto r = g.query(TemplateId::kSobjPredict, {{"attribute", "size"}, {"text", "t"}}, &img);
            EXPECT_EQ(r.attempts, 1);
            const double c = response_confidence(r);
            EXPECT_GE(c, 0.0);
            EXPECT_LE(c, 1.0);
            const auto d = response_distribution(r, names);
            EXPECT_EQ(d.size(), k);
            if (seed % 50 == 0) {
                EXPECT_FALSE(response_text(g.query(TemplateId::kSobjCaption,
                                                   {{"object", "tree"}, {"attribute", "roots"}}, &img))
                                 .empty());
                EXPECT_EQ(g.query(TemplateId::kWholePredict, {}, &img).attempts, 1);
            }
        }
    }
}

TEST(Mock, FeatureGenAvoidsExcluded) {
    BackendGateway g(std::make_shared<MockBackend>(3, kBinary), TemplateSet(kBinary));
    std::string excluded = "size, position";
    std::set<std::string> seen;
    for (int i = 0; i < 10; ++i) {
        const auto phrase = response_text(g.query(TemplateId::kFeatureGen, {{"object", "tree"}, {"excluded_features", excluded}}));
        EXPECT_TRUE(seen.insert(phrase).second) << phrase;
        excluded += ", " + phrase;
    }
}

/// Backend scripted by a list of replies; throws TransportError for "!fail".
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
    std::string complete(const BackendRequest&, std::chrono::milliseconds) override {
        std::lock_guard lock(mu_);
        const auto r = replies_.at(std::min(calls_++, replies_.size() - 1));
        if (r == "!fail") throw TransportError("connection refused");
        return r;
    }
    std::string name() const override { return "scripted"; }
    std::size_t calls() const { return calls_; }

private:
    std::mutex mu_;
    std::vector<std::string> replies_;
    std::size_t calls_ = 0;
};

TEST(Gateway, ParseFailuresExhaustRetries) {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"junk 1", "junk 2", "junk 3", "ok"});
    BackendGateway g(backend, TemplateSet(kBinary));
    try {
        g.query(TemplateId::kWholePredict, {});
        FAIL();
    } catch (const BackendError& e) {
        EXPECT_EQ(e.kind(), BackendError::Kind::kParse);
        EXPECT_EQ(e.last_raw_text(), "junk 3");
        EXPECT_EQ(e.attempts(), 3);
    }
    EXPECT_EQ(backend->calls(), 3u);
}

TEST(Gateway, TransportFailuresAreDistinguished) {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{"!fail"});
    BackendGateway g(backend, TemplateSet(kBinary), {2});
    try {
        g.query(TemplateId::kWholePredict, {});
        FAIL();
    } catch (const BackendError& e) {
        EXPECT_EQ(e.kind(), BackendError::Kind::kTransport);
        EXPECT_EQ(e.attempts(), 2);
    }
}

TEST(Gateway, RecoversAfterTransportFailure) {
    auto backend = std::make_shared<ScriptedBackend>(
        std::vector<std::string>{"!fail", "{Positive: 0.2; Negative: 0.8}"});
    BackendGateway g(backend, TemplateSet(kBinary));
    const auto r = g.query(TemplateId::kWholePredict, {});
    EXPECT_EQ(r.attempts, 2);
    EXPECT_NEAR(response_distribution(r, kBinary)[1], 0.8, 1e-12);
}

/// Counts concurrent calls.
class SlowBackend : public Backend {
public:
    std::string complete(const BackendRequest&, std::chrono::milliseconds) override {
        const int now = ++active_;
        int seen = peak_.load();
        while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        --active_;
        return "{Positive: 0.5; Negative: 0.5}";
    }
    std::string name() const override { return "slow"; }
    int peak() const { return peak_; }

private:
    std::atomic<int> active_{0};
    std::atomic<int> peak_{0};
};

TEST(Gateway, BoundsInFlightRequests) {
    auto backend = std::make_shared<SlowBackend>();
    BackendGateway g(backend, TemplateSet(kBinary), {3, std::chrono::milliseconds(1000), 2});
    std::vector<std::jthread> threads;
    for (int t = 0; t < 6; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 5; ++i) g.query(TemplateId::kWholePredict, {});
        });
    }
    threads.clear();
    EXPECT_LE(backend->peak(), 2);
    EXPECT_GE(backend->peak(), 1);
}

/// Local chat endpoint: the first `malformed` replies carry unparseable text.
class ChatServer {
public:
    explicit ChatServer(int malformed) : malformed_(malformed) {
        server_.Post("/chat", [this](const httplib::Request& req, httplib::Response& res) {
            const auto body = nlohmann::json::parse(req.body);
            {
                std::lock_guard lock(mu_);
                last_auth_ = req.get_header_value("Authorization");
                last_body_ = body;
            }
            const int n = ++requests_;
            const std::string text = n <= malformed_ ? "I cannot decide." : "{Positive: 0.25; Negative: 0.75}";
            res.set_content(nlohmann::json{{"text", text}}.dump(), "application/json");
        });
        server_.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~ChatServer() {
        server_.stop();
        thread_.join();
    }
    std::string url(const std::string& path = "/chat") const {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }
    int requests() const { return requests_; }
    std::string last_auth() {
        std::lock_guard lock(mu_);
        return last_auth_;
    }
    nlohmann::json last_body() {
        std::lock_guard lock(mu_);
        return last_body_;
    }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    int malformed_;
    std::atomic<int> requests_{0};
    std::mutex mu_;
    std::string last_auth_;
    nlohmann::json last_body_;
};

TEST(HttpBackend, MalformedTwiceThenValid) {
    ChatServer server(2);
    auto backend = std::make_shared<HttpBackend>(HttpBackendConfig{server.url(), "test-model", "secret"});
    BackendGateway g(backend, TemplateSet(kBinary));
    const ImageRef img{"d1|whole|full", std::vector<std::uint8_t>{'P', 'N', 'G'}};
    const auto r = g.query(TemplateId::kWholePredict, {}, &img);
    EXPECT_EQ(r.attempts, 3);
    EXPECT_EQ(server.requests(), 3);
    EXPECT_NEAR(response_distribution(r, kBinary)[0], 0.25, 1e-12);
    EXPECT_EQ(server.last_auth(), "Bearer secret");
    const auto body = server.last_body();
    EXPECT_EQ(body["model"], "test-model");
    EXPECT_EQ(body["image_base64"], "UE5H");
    EXPECT_EQ(body["prompt"], TemplateSet(kBinary).render(TemplateId::kWholePredict, {}));
}

TEST(HttpBackend, ServerErrorIsTransportFailure) {
    ChatServer server(0);
    auto backend = std::make_shared<HttpBackend>(HttpBackendConfig{server.url("/broken"), "m", ""});
    BackendGateway g(backend, TemplateSet(kBinary), {2, std::chrono::milliseconds(2000), 4});
    try {
        g.query(TemplateId::kWholePredict, {});
        FAIL();
    } catch (const BackendError& e) {
        EXPECT_EQ(e.kind(), BackendError::Kind::kTransport);
    }
    EXPECT_THROW(HttpBackend(HttpBackendConfig{"ftp://x", "m", ""}), ValidationError);
}

}  // namespace
}  // namespace pick
