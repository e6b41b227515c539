// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/embedder.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "http_client.hpp"
#include "pick/errors.hpp"
#include "pick/hashing.hpp"
#include "text_util.hpp"

namespace pick {

Embedding Embedder::embed(std::string_view text) const {
    const std::string owned(text);
    auto out = embed_batch(std::span<const std::string>(&owned, 1));
    return std::move(out.front());
}

HashedTrigramEmbedder::HashedTrigramEmbedder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) {
        throw ValidationError("embedding dimension must be positive");
    }
}

std::string HashedTrigramEmbedder::id() const { return "hashed-char3-fnv1a-" + std::to_string(dimension_); }

Embedding HashedTrigramEmbedder::embed_one(std::string_view text) const {
    if (text.empty()) {
        throw ValidationError("cannot embed empty text");
    }
    const std::string lower = detail::to_lower(text);
    Embedding v(dimension_, 0.0);
    const std::string_view s(lower);
    if (s.size() < 3) {
        v[fnv1a64(s) % dimension_] += 1.0;
    } else {
        for (std::size_t i = 0; i + 3 <= s.size(); ++i) {
            v[fnv1a64(s.substr(i, 3)) % dimension_] += 1.0;
        }
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

std::vector<Embedding> HashedTrigramEmbedder::embed_batch(std::span<const std::string> texts) const {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

HttpEmbedder::HttpEmbedder(HttpEmbedderConfig config)
    : config_(std::move(config)), resolved_dimension_(config_.dimension) {
    detail::parse_url(config_.endpoint);
    if (config_.max_retries < 1) config_.max_retries = 1;
    if (config_.batch_size == 0) config_.batch_size = 1;
}

std::string HttpEmbedder::id() const { return "http:" + config_.endpoint; }

std::size_t HttpEmbedder::dimension() const {
    if (resolved_dimension_.load() == 0) {
        const std::string probe = "dimension probe";
        request(std::span<const std::string>(&probe, 1));
    }
    return resolved_dimension_;
}

std::vector<Embedding> HttpEmbedder::request(std::span<const std::string> texts) const {
    nlohmann::json body;
    body["texts"] = std::vector<std::string>(texts.begin(), texts.end());
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 1; attempt <= config_.max_retries; ++attempt) {
        std::string raw;
        try {
            raw = detail::http_post_json(config_.endpoint, payload, {}, config_.timeout);
        } catch (const TransportError& e) {
            last_error = e.what();
            continue;
        }
        nlohmann::json doc = nlohmann::json::parse(raw, nullptr, false);
        if (doc.is_discarded() || !doc.contains("vectors") || !doc["vectors"].is_array()) {
            last_error = "malformed embedding response";
            continue;
        }
        const auto& vectors = doc["vectors"];
        if (vectors.size() != texts.size()) {
            throw ValidationError("embedding server returned " + std::to_string(vectors.size()) +
                                  " vectors for " + std::to_string(texts.size()) + " texts");
        }
        std::size_t declared = 0;
        std::vector<Embedding> out;
        try {
            if (doc.contains("dim")) declared = doc["dim"].get<std::size_t>();
            out.reserve(vectors.size());
            for (const auto& v : vectors) out.push_back(v.get<Embedding>());
        } catch (const nlohmann::json::exception&) {
            last_error = "embedding response holds non-numeric values";
            continue;
        }
        for (const auto& v : out) {
            if (declared == 0) declared = v.size();
            if (v.size() != declared) {
                throw ValidationError("embedding has dimension " + std::to_string(v.size()) + ", server declared " +
                                      std::to_string(declared));
            }
        }
        std::size_t expected = 0;
        resolved_dimension_.compare_exchange_strong(expected, declared);
        if (declared != resolved_dimension_.load()) {
            throw ValidationError("embedding dimension " + std::to_string(declared) + " does not match expected " +
                                  std::to_string(resolved_dimension_.load()));
        }
        return out;
    }
    throw EmbeddingError("embedding provider failed after " + std::to_string(config_.max_retries) +
                         " attempts: " + last_error);
}

std::vector<Embedding> HttpEmbedder::embed_batch(std::span<const std::string> texts) const {
    for (const auto& t : texts) {
        if (t.empty()) throw ValidationError("cannot embed empty text");
    }
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
        const std::size_t n = std::min(config_.batch_size, texts.size() - start);
        auto chunk = request(texts.subspan(start, n));
        for (auto& v : chunk) out.push_back(std::move(v));
    }
    return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw ValidationError("cosine of vectors with different dimensions");
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace pick
