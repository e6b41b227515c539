// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/knowledge_base.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "pick/errors.hpp"
#include "text_util.hpp"

namespace pick {

namespace {

constexpr double kLabelSumTolerance = 1e-6;

std::vector<double> checked_probs(std::vector<double> probs, std::size_t k, const std::string& where) {
    if (probs.size() != k) {
        throw ValidationError(where + ": expected " + std::to_string(k) + " probabilities, got " +
                              std::to_string(probs.size()));
    }
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0) {
            throw ValidationError(where + ": probabilities must be finite and non-negative");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kLabelSumTolerance) {
        throw ValidationError(where + ": soft label sums to " + detail::format_double(sum) + ", expected 1");
    }
    for (double& p : probs) p /= sum;
    return probs;
}

std::string lexicon_key(std::string_view term) { return detail::to_lower(detail::trim(term)); }

}  // namespace

Lexicon Lexicon::parse(std::string_view json_text, std::vector<std::string> class_names) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed lexicon JSON: ") + e.what(),
                         detail::line_of_offset(json_text, e.byte));
    }
    if (!doc.is_object()) {
        throw ParseError("lexicon must be a JSON object", 1);
    }
    Lexicon lex(std::move(class_names));
    for (const auto& [term, value] : doc.items()) {
        if (!value.is_array()) {
            throw ValidationError("lexicon entry '" + term + "' must be an array");
        }
        lex.add(term, value.get<std::vector<double>>());
    }
    return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path, std::vector<std::string> class_names) {
    return parse(detail::read_file(path.string()), std::move(class_names));
}

void Lexicon::add(std::string_view term, std::vector<double> probs) {
    entries_[lexicon_key(term)] =
        checked_probs(std::move(probs), class_names_.size(), "lexicon entry '" + std::string(term) + "'");
}

std::optional<EmotionDistribution> Lexicon::lookup(std::string_view term) const {
    const auto it = entries_.find(lexicon_key(term));
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return EmotionDistribution(class_names_, it->second);
}

KnowledgeBase::KnowledgeBase(std::vector<TripletRecord> records, std::string embedder_id,
                             std::vector<std::string> class_names)
    : records_(std::move(records)), embedder_id_(std::move(embedder_id)), class_names_(std::move(class_names)) {
    if (records_.empty()) {
        throw IngestError("knowledge base is empty");
    }
    dimension_ = records_.front().embedding.size();
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (records_[i].embedding.size() != dimension_) {
            throw ValidationError("record " + std::to_string(i) + " has embedding dimension " +
                                  std::to_string(records_[i].embedding.size()) + ", expected " +
                                  std::to_string(dimension_));
        }
        if (records_[i].soft_label.class_names() != class_names_) {
            throw ValidationError("record " + std::to_string(i) + " has a soft label over different classes");
        }
    }
}

std::vector<TripletSource> parse_kb_jsonl(std::string_view text, std::size_t class_count, std::string_view source) {
    std::vector<TripletSource> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const std::string_view line =
            detail::trim(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        if (line.empty()) continue;

        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("malformed KB record in " + std::string(source) + ": " + e.what(), line_no);
        }
        const std::string where = std::string(source) + " line " + std::to_string(line_no);
        if (!rec.is_object()) {
            throw ParseError("KB record must be an object in " + std::string(source), line_no);
        }
        TripletSource t;
        try {
            t.head = rec.at("head").get<std::string>();
            t.relation = rec.at("relation").get<std::string>();
            t.tail = rec.at("tail").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw ParseError("KB record needs string head, relation and tail in " + std::string(source), line_no);
        }
        if (detail::trim(t.head).empty()) {
            throw ValidationError(where + ": empty head");
        }
        if (rec.contains("probs")) {
            t.explicit_probs = checked_probs(rec["probs"].get<std::vector<double>>(), class_count, where);
        } else if (rec.contains("pos") || rec.contains("neg")) {
            if (class_count != 2) {
                throw ValidationError(where + ": pos/neg labels need a two-class task, use probs");
            }
            if (!rec.contains("pos") || !rec.contains("neg")) {
                throw ValidationError(where + ": pos and neg must be given together");
            }
            t.explicit_probs =
                checked_probs({rec["pos"].get<double>(), rec["neg"].get<double>()}, class_count, where);
        }
        out.push_back(std::move(t));
    }
    if (out.empty()) {
        throw IngestError("knowledge base file " + std::string(source) + " has no records");
    }
    return out;
}

KnowledgeBase build_knowledge_base(std::span<const TripletSource> sources, const Lexicon& lexicon,
                                   const Embedder& embedder, const std::vector<std::string>& class_names) {
    if (sources.empty()) {
        throw IngestError("knowledge base has no records");
    }
    std::vector<std::string> heads;
    heads.reserve(sources.size());
    for (const auto& s : sources) heads.push_back(s.head);
    auto embeddings = embedder.embed_batch(heads);

    std::vector<TripletRecord> records;
    records.reserve(sources.size());
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const auto& s = sources[i];
        std::optional<EmotionDistribution> label;
        if (s.explicit_probs) {
            label.emplace(class_names, *s.explicit_probs);
        } else {
            label = lexicon.lookup(s.tail);
        }
        if (!label) {
            label = EmotionDistribution::uniform(class_names);
        }
        records.push_back(TripletRecord{s.head, s.relation, s.tail, std::move(*label), std::move(embeddings[i])});
    }
    return KnowledgeBase(std::move(records), embedder.id(), class_names);
}

KnowledgeBase ingest_kb(const std::filesystem::path& kb_path, const std::filesystem::path& lexicon_path,
                        const Embedder& embedder, const std::vector<std::string>& class_names) {
    const std::string text = detail::read_file(kb_path.string());
    if (detail::trim(text).empty()) {
        throw IngestError("knowledge base file " + kb_path.string() + " is empty");
    }
    const auto sources = parse_kb_jsonl(text, class_names.size(), kb_path.string());
    const Lexicon lexicon = lexicon_path.empty() ? Lexicon(class_names) : Lexicon::load(lexicon_path, class_names);
    return build_knowledge_base(sources, lexicon, embedder, class_names);
}

std::vector<ScoredTriplet> retrieve_by_vector(const KnowledgeBase& kb, std::span<const double> query, std::size_t k) {
    if (k == 0) {
        throw ValidationError("retrieve needs k >= 1");
    }
    if (query.size() != kb.dimension()) {
        throw ValidationError("query dimension " + std::to_string(query.size()) + " does not match KB dimension " +
                              std::to_string(kb.dimension()));
    }
    const auto& records = kb.records();
    std::vector<ScoredTriplet> scored(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        scored[i] = ScoredTriplet{&records[i], i, cosine_similarity(query, records[i].embedding)};
    }
    const auto better = [](const ScoredTriplet& a, const ScoredTriplet& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.index < b.index;
    };
    const std::size_t n = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
    scored.resize(n);
    return scored;
}

std::vector<ScoredTriplet> retrieve(const KnowledgeBase& kb, const Embedder& embedder, std::string_view query_text,
                                    std::size_t k) {
    const Embedding q = embedder.embed(query_text);
    return retrieve_by_vector(kb, q, k);
}

KbPrediction kb_predict(const KnowledgeBase& kb, const Embedder& embedder, std::string_view description) {
    const auto hits = retrieve(kb, embedder, description, 1);
    const auto& best = hits.front();
    return KbPrediction{best.record->soft_label, best.similarity, best.index};
}

}  // namespace pick
