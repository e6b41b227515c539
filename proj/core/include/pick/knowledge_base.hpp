// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pick/distribution.hpp"
#include "pick/embedder.hpp"

namespace pick {

/// (drawing description, relation, mental state) with a soft label and the
/// embedding of its head.
struct TripletRecord {
    std::string head;
    std::string relation;
    std::string tail;
    EmotionDistribution soft_label;
    Embedding embedding;

    friend bool operator==(const TripletRecord&, const TripletRecord&) = default;
};

/// Maps lowercased, trimmed tail terms to class probabilities.
class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(std::vector<std::string> class_names) : class_names_(std::move(class_names)) {}

    /// Parses `{term: [p_0, ..., p_{K-1}]}`. Entries must be non-negative and sum to 1 within 1e-6.
    static Lexicon parse(std::string_view json_text, std::vector<std::string> class_names);
    static Lexicon load(const std::filesystem::path& path, std::vector<std::string> class_names);

    void add(std::string_view term, std::vector<double> probs);
    std::optional<EmotionDistribution> lookup(std::string_view term) const;
    std::size_t size() const noexcept { return entries_.size(); }

private:
    std::vector<std::string> class_names_;
    std::map<std::string, std::vector<double>> entries_;
};

/// Immutable after construction; retrieval is safe from multiple threads.
class KnowledgeBase {
public:
    KnowledgeBase(std::vector<TripletRecord> records, std::string embedder_id, std::vector<std::string> class_names);

    const std::vector<TripletRecord>& records() const noexcept { return records_; }
    const std::string& embedder_id() const noexcept { return embedder_id_; }
    std::size_t dimension() const noexcept { return dimension_; }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }
    std::size_t size() const noexcept { return records_.size(); }

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

private:
    std::vector<TripletRecord> records_;
    std::string embedder_id_;
    std::vector<std::string> class_names_;
    std::size_t dimension_ = 0;
};

/// Raw KB line before labelling and embedding.
struct TripletSource {
    std::string head;
    std::string relation;
    std::string tail;
    std::optional<std::vector<double>> explicit_probs;
};

/// Parses KB JSONL. Accepts `{head, relation, tail}` optionally with `pos`/`neg`
/// (two classes) or `probs` (K classes).
std::vector<TripletSource> parse_kb_jsonl(std::string_view text, std::size_t class_count,
                                          std::string_view source = "<memory>");

/// Soft label precedence: explicit probabilities, then lexicon on the tail, then uniform.
KnowledgeBase build_knowledge_base(std::span<const TripletSource> sources, const Lexicon& lexicon,
                                   const Embedder& embedder, const std::vector<std::string>& class_names);

KnowledgeBase ingest_kb(const std::filesystem::path& kb_path, const std::filesystem::path& lexicon_path,
                        const Embedder& embedder,
                        const std::vector<std::string>& class_names = binary_class_names());

struct ScoredTriplet {
    const TripletRecord* record = nullptr;
    std::size_t index = 0;
    double similarity = 0.0;
};

/// Top-k by cosine against record head embeddings, ties by record order.
std::vector<ScoredTriplet> retrieve_by_vector(const KnowledgeBase& kb, std::span<const double> query, std::size_t k);
std::vector<ScoredTriplet> retrieve(const KnowledgeBase& kb, const Embedder& embedder, std::string_view query_text,
                                    std::size_t k);

/// KB-side prediction for a description: soft label and similarity of the best match.
struct KbPrediction {
    EmotionDistribution distribution;
    double similarity;
    std::size_t index;
};

KbPrediction kb_predict(const KnowledgeBase& kb, const Embedder& embedder, std::string_view description);

}  // namespace pick
