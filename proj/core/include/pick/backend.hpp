// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <variant>
#include <vector>

#include "pick/distribution.hpp"
#include "pick/prompt.hpp"

namespace pick {

/// Image attached to a request. `id` identifies the view (source image plus
/// focus box) and is all the mock backend looks at; `png` carries the
/// annotated bytes for backends that actually see images.
struct ImageRef {
    std::string id;
    std::optional<std::vector<std::uint8_t>> png;
};

struct BackendRequest {
    Role role;
    TemplateId template_id;
    const SlotMap* slots = nullptr;
    std::string prompt;
    const ImageRef* image = nullptr;
};

/// Transport to a model. `complete` returns raw model text or throws TransportError.
class Backend {
public:
    virtual ~Backend() = default;

    virtual std::string complete(const BackendRequest& request, std::chrono::milliseconds timeout) = 0;
    /// Whether requests should carry encoded image bytes.
    virtual bool wants_image_bytes() const { return false; }
    virtual std::string name() const = 0;
};

/// Stateless deterministic backend. Every output is a pure function of
/// (role, template id, slot values, image id, seed) and always parses.
class MockBackend final : public Backend {
public:
    MockBackend(std::uint64_t seed, std::vector<std::string> class_names);

    std::string complete(const BackendRequest& request, std::chrono::milliseconds timeout) override;
    std::string name() const override { return "mock"; }

    /// 64-bit digest of the request identity.
    std::uint64_t digest(const BackendRequest& request) const;

private:
    std::uint64_t seed_;
    std::vector<std::string> class_names_;
};

struct HttpBackendConfig {
    std::string endpoint;
    std::string model;
    std::string api_key;
};

/// `POST {model, prompt, image_base64?} -> {text}`.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    std::string complete(const BackendRequest& request, std::chrono::milliseconds timeout) override;
    bool wants_image_bytes() const override { return true; }
    std::string name() const override { return "http"; }

private:
    HttpBackendConfig config_;
};

struct Distribution {
    std::vector<double> probs;
    friend bool operator==(const Distribution&, const Distribution&) = default;
};
struct DistributionWithConfidence {
    std::vector<double> probs;
    double confidence = 0.0;
    friend bool operator==(const DistributionWithConfidence&, const DistributionWithConfidence&) = default;
};
struct Caption {
    std::string text;
    friend bool operator==(const Caption&, const Caption&) = default;
};
struct Phrase {
    std::string text;
    friend bool operator==(const Phrase&, const Phrase&) = default;
};

using ParsedOutput = std::variant<Distribution, DistributionWithConfidence, Caption, Phrase>;

struct BackendResponse {
    std::string raw_text;
    std::optional<ParsedOutput> parsed;
    int attempts = 0;

    friend bool operator==(const BackendResponse&, const BackendResponse&) = default;
};

struct GatewayConfig {
    int max_retries = 3;
    std::chrono::milliseconds timeout{60'000};
    std::ptrdiff_t max_in_flight = 4;
};

/// Renders prompts, sends them through a backend and parses the replies.
/// Thread-safe; at most `max_in_flight` requests run concurrently.
class BackendGateway {
public:
    BackendGateway(std::shared_ptr<Backend> backend, TemplateSet templates, GatewayConfig config = {});

    /// Up to max_retries attempts; parse or transport failures re-prompt.
    /// Throws BackendError carrying the last raw text once attempts run out.
    BackendResponse query(TemplateId template_id, const SlotMap& slots, const ImageRef* image = nullptr);

    const TemplateSet& templates() const noexcept { return templates_; }
    const GatewayConfig& config() const noexcept { return config_; }
    Backend& backend() noexcept { return *backend_; }
    bool wants_image_bytes() const { return backend_->wants_image_bytes(); }

private:
    ParsedOutput parse(TemplateId template_id, const std::string& raw) const;

    std::shared_ptr<Backend> backend_;
    TemplateSet templates_;
    GatewayConfig config_;
    std::counting_semaphore<> in_flight_;
};

/// Typed accessors over a parsed response.
EmotionDistribution response_distribution(const BackendResponse& response,
                                          const std::vector<std::string>& class_names);
double response_confidence(const BackendResponse& response);
const std::string& response_text(const BackendResponse& response);

}  // namespace pick
