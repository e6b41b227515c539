// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/backend.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <set>

#include <json.hpp>

#include "http_client.hpp"
#include "pick/errors.hpp"
#include "pick/hashing.hpp"
#include "pick/response_parser.hpp"
#include "text_util.hpp"

namespace pick {

namespace {

constexpr std::array<std::string_view, 20> kMockAdjectives = {
    "thin",   "heavy", "faint",  "broken", "smooth", "jagged",   "dark",  "light", "small", "large",
    "sparse", "dense", "curved", "rigid",  "open",   "detailed", "tall",  "short", "bare",  "shaded"};

constexpr std::array<std::string_view, 12> kMockNouns = {"lines",   "strokes", "outlines", "shapes",
                                                        "edges",   "marks",   "contours", "details",
                                                        "shading", "spaces",  "forms",    "textures"};

constexpr std::array<std::string_view, 16> kMockPhrases = {
    "window count",   "door state",      "roof slope",     "chimney smoke", "branch spread", "trunk width",
    "crown size",     "root visibility", "arm position",   "facial detail", "stance width",  "hand shape",
    "line pressure",  "wall texture",    "leaf density",   "ground line"};

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

/// Hundredths over K classes summing to exactly 100.
std::vector<int> mock_hundredths(std::uint64_t& state, std::size_t k) {
    std::vector<std::uint64_t> raw(k);
    std::uint64_t total = 0;
    for (auto& r : raw) {
        r = splitmix64(state) % 1000 + 1;
        total += r;
    }
    std::vector<int> out(k);
    int assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        out[i] = static_cast<int>(raw[i] * 100 / total);
        assigned += out[i];
    }
    out[splitmix64(state) % k] += 100 - assigned;
    return out;
}

}  // namespace

MockBackend::MockBackend(std::uint64_t seed, std::vector<std::string> class_names)
    : seed_(seed), class_names_(std::move(class_names)) {
    if (class_names_.size() < 2) {
        throw ValidationError("mock backend needs at least two classes");
    }
}

std::uint64_t MockBackend::digest(const BackendRequest& request) const {
    std::uint64_t h = kFnvOffset;
    const auto mix = [&h](std::string_view part) {
        h = fnv1a64(part, h);
        h = fnv1a64(std::string_view("\x1f", 1), h);
    };
    mix(to_string(request.role));
    mix(to_string(request.template_id));
    if (request.slots) {
        for (const auto& [k, v] : *request.slots) {
            mix(k);
            mix(v);
        }
    }
    mix(request.image ? request.image->id : std::string("<none>"));
    mix(std::to_string(seed_));
    return h;
}

std::string MockBackend::complete(const BackendRequest& request, std::chrono::milliseconds) {
    std::uint64_t state = digest(request);
    const auto slot = [&](const char* name) -> std::string {
        if (!request.slots) return {};
        const auto it = request.slots->find(name);
        return it == request.slots->end() ? std::string() : it->second;
    };

    switch (output_shape_of(request.template_id)) {
        case OutputShape::kDistribution:
        case OutputShape::kDistributionWithConfidence: {
            const auto h = mock_hundredths(state, class_names_.size());
            std::string out = "{";
            for (std::size_t i = 0; i < h.size(); ++i) {
                if (i) out += "; ";
                out += class_names_[i] + ": " + two_decimals(h[i] / 100.0);
            }
            out += "}";
            if (output_shape_of(request.template_id) == OutputShape::kDistributionWithConfidence) {
                out += "; Confidence: " + two_decimals(static_cast<double>(splitmix64(state) % 101) / 100.0);
            }
            return out;
        }
        case OutputShape::kCaption: {
            std::string object = slot("object");
            if (object.empty()) object = "object";
            std::string attribute = slot("attribute");
            if (attribute.empty()) attribute = "overall form";
            const auto adj1 = kMockAdjectives[splitmix64(state) % kMockAdjectives.size()];
            const auto adj2 = kMockAdjectives[splitmix64(state) % kMockAdjectives.size()];
            const auto noun = kMockNouns[splitmix64(state) % kMockNouns.size()];
            return "Description: The " + object + " shows its " + attribute + " drawn with " + std::string(adj1) +
                   " " + std::string(adj2) + " " + std::string(noun) + ".";
        }
        case OutputShape::kPhrase: {
            std::set<std::string> excluded;
            std::string list = slot("excluded_features");
            std::size_t pos = 0;
            while (pos <= list.size()) {
                const auto comma = list.find(',', pos);
                const auto item = detail::trim(std::string_view(list).substr(
                    pos, comma == std::string::npos ? std::string::npos : comma - pos));
                if (!item.empty()) excluded.insert(detail::to_lower(item));
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            const std::size_t start = splitmix64(state) % kMockPhrases.size();
            for (std::size_t i = 0; i < kMockPhrases.size(); ++i) {
                const auto phrase = kMockPhrases[(start + i) % kMockPhrases.size()];
                if (!excluded.contains(std::string(phrase))) return std::string(phrase);
            }
            return std::string(kMockPhrases[start]);
        }
    }
    return {};
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    detail::parse_url(config_.endpoint);
}

std::string HttpBackend::complete(const BackendRequest& request, std::chrono::milliseconds timeout) {
    nlohmann::json body;
    body["model"] = config_.model;
    body["prompt"] = request.prompt;
    if (request.image && request.image->png) {
        const auto& png = *request.image->png;
        body["image_base64"] =
            detail::base64_encode(std::string_view(reinterpret_cast<const char*>(png.data()), png.size()));
    }
    detail::HeaderList headers;
    if (!config_.api_key.empty()) {
        headers.emplace_back("Authorization", "Bearer " + config_.api_key);
    }
    const std::string raw = detail::http_post_json(config_.endpoint, body.dump(), headers, timeout);
    const auto doc = nlohmann::json::parse(raw, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("text") || !doc["text"].is_string()) {
        throw TransportError("backend reply is not {\"text\": ...}");
    }
    return doc["text"].get<std::string>();
}

BackendGateway::BackendGateway(std::shared_ptr<Backend> backend, TemplateSet templates, GatewayConfig config)
    : backend_(std::move(backend)),
      templates_(std::move(templates)),
      config_(config),
      in_flight_(std::max<std::ptrdiff_t>(1, config.max_in_flight)) {
    if (!backend_) throw ValidationError("gateway needs a backend");
    if (config_.max_retries < 1) config_.max_retries = 1;
}

ParsedOutput BackendGateway::parse(TemplateId template_id, const std::string& raw) const {
    switch (output_shape_of(template_id)) {
        case OutputShape::kDistribution:
            return Distribution{parse_distribution(raw, false, templates_.class_names()).probs};
        case OutputShape::kDistributionWithConfidence: {
            auto d = parse_distribution(raw, true, templates_.class_names());
            return DistributionWithConfidence{std::move(d.probs), *d.confidence};
        }
        case OutputShape::kCaption:
            return Caption{parse_caption(raw)};
        case OutputShape::kPhrase:
            return Phrase{parse_phrase(raw)};
    }
    throw ResponseParseError("unknown output shape");
}

BackendResponse BackendGateway::query(TemplateId template_id, const SlotMap& slots, const ImageRef* image) {
    BackendRequest request{role_of(template_id), template_id, &slots, templates_.render(template_id, slots), image};

    std::string last_raw;
    std::string last_error;
    BackendError::Kind last_kind = BackendError::Kind::kTransport;
    for (int attempt = 1; attempt <= config_.max_retries; ++attempt) {
        std::string raw;
        {
            in_flight_.acquire();
            try {
                raw = backend_->complete(request, config_.timeout);
            } catch (const TransportError& e) {
                in_flight_.release();
                last_kind = BackendError::Kind::kTransport;
                last_error = e.what();
                continue;
            } catch (...) {
                in_flight_.release();
                throw;
            }
            in_flight_.release();
        }
        try {
            BackendResponse response{raw, parse(template_id, raw), attempt};
            return response;
        } catch (const ResponseParseError& e) {
            last_kind = BackendError::Kind::kParse;
            last_error = e.what();
            last_raw = std::move(raw);
        }
    }
    throw BackendError(std::string(to_string(template_id)) + " failed after " + std::to_string(config_.max_retries) +
                           " attempts: " + last_error,
                       last_kind, last_raw, config_.max_retries);
}

EmotionDistribution response_distribution(const BackendResponse& response,
                                          const std::vector<std::string>& class_names) {
    if (!response.parsed) throw ResponseParseError("response was not parsed");
    if (const auto* d = std::get_if<Distribution>(&*response.parsed)) {
        return EmotionDistribution::normalized(class_names, d->probs);
    }
    if (const auto* d = std::get_if<DistributionWithConfidence>(&*response.parsed)) {
        return EmotionDistribution::normalized(class_names, d->probs);
    }
    throw ResponseParseError("response does not hold a distribution");
}

double response_confidence(const BackendResponse& response) {
    if (response.parsed) {
        if (const auto* d = std::get_if<DistributionWithConfidence>(&*response.parsed)) return d->confidence;
    }
    throw ResponseParseError("response does not hold a confidence score");
}

const std::string& response_text(const BackendResponse& response) {
    if (response.parsed) {
        if (const auto* c = std::get_if<Caption>(&*response.parsed)) return c->text;
        if (const auto* p = std::get_if<Phrase>(&*response.parsed)) return p->text;
    }
    throw ResponseParseError("response does not hold text");
}

}  // namespace pick
