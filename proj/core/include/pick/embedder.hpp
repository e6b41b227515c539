// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pick {

using Embedding = std::vector<double>;

/// Text embedding provider. Implementations must be deterministic for a fixed
/// configuration and safe to call concurrently.
class Embedder {
public:
    virtual ~Embedder() = default;

    virtual std::string id() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::vector<Embedding> embed_batch(std::span<const std::string> texts) const = 0;

    Embedding embed(std::string_view text) const;
};

/// Hashed character 3-gram counts, L2-normalized.
class HashedTrigramEmbedder final : public Embedder {
public:
    static constexpr std::size_t kDefaultDimension = 512;

    explicit HashedTrigramEmbedder(std::size_t dimension = kDefaultDimension);

    std::string id() const override;
    std::size_t dimension() const override { return dimension_; }
    std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override;

    Embedding embed_one(std::string_view text) const;

private:
    std::size_t dimension_;
};

struct HttpEmbedderConfig {
    std::string endpoint;
    /// Expected vector size; 0 accepts whatever the server declares on first use.
    std::size_t dimension = 0;
    int max_retries = 3;
    std::chrono::milliseconds timeout{60'000};
    std::size_t batch_size = 64;
};

/// Client for `POST {"texts":[...]} -> {"vectors":[[...]], "dim":D}`.
class HttpEmbedder final : public Embedder {
public:
    explicit HttpEmbedder(HttpEmbedderConfig config);

    std::string id() const override;
    std::size_t dimension() const override;
    std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override;

private:
    std::vector<Embedding> request(std::span<const std::string> texts) const;

    HttpEmbedderConfig config_;
    mutable std::atomic<std::size_t> resolved_dimension_;
};

/// Cosine similarity; 0 when either vector has zero norm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace pick
