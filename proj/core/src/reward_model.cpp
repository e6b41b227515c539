// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/reward_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "pick/errors.hpp"
#include "pick/hashing.hpp"
#include "text_util.hpp"

namespace pick {

double entropy(std::span<const double> probs) noexcept {
    double h = 0.0;
    for (double p : probs) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double entropy(const EmotionDistribution& dist) noexcept { return entropy(dist.probs()); }

double normalized_entropy(const EmotionDistribution& dist) noexcept {
    const double h = entropy(dist) / std::log(static_cast<double>(dist.size()));
    return std::clamp(h, 0.0, 1.0);
}

double reward_score(const EmotionDistribution& dist) noexcept { return 1.0 - normalized_entropy(dist); }

double kl_divergence(std::span<const double> target, std::span<const double> predicted) noexcept {
    double kl = 0.0;
    for (std::size_t k = 0; k < target.size(); ++k) {
        if (target[k] > 0.0) kl += target[k] * (std::log(target[k]) - std::log(predicted[k]));
    }
    return kl;
}

std::uint32_t token_bucket(std::string_view token, std::size_t buckets) noexcept {
    return static_cast<std::uint32_t>(fnv1a64(token) % buckets);
}

SparseFeatures featurize(std::string_view text, std::size_t buckets) {
    std::map<std::uint32_t, double> counts;
    for (const auto& tok : detail::split_whitespace(detail::to_lower(text))) {
        counts[token_bucket(tok, buckets)] += 1.0;
    }
    return SparseFeatures(counts.begin(), counts.end());
}

TextScorer::TextScorer(std::size_t buckets, std::vector<std::string> class_names)
    : buckets_(buckets), class_names_(std::move(class_names)) {
    if (buckets_ == 0) throw ValidationError("scorer needs at least one feature bucket");
    if (class_names_.size() < 2) throw ValidationError("scorer needs at least two classes");
    weights_.assign(buckets_ * class_names_.size(), 0.0);
    bias_.assign(class_names_.size(), 0.0);
}

std::vector<double> TextScorer::logits(const SparseFeatures& features) const {
    std::vector<double> z = bias_;
    const std::size_t k = class_count();
    for (const auto& [bucket, count] : features) {
        const double* row = weights_.data() + static_cast<std::size_t>(bucket) * k;
        for (std::size_t c = 0; c < k; ++c) z[c] += row[c] * count;
    }
    return z;
}

std::vector<double> TextScorer::predict(const SparseFeatures& features) const { return softmax(logits(features)); }

EmotionDistribution TextScorer::score_text(std::string_view text) const {
    return EmotionDistribution::normalized(class_names_, predict(featurize(text, buckets_)));
}

EmotionDistribution score_text(const TextScorer& scorer, std::string_view text) { return scorer.score_text(text); }

std::string TextScorer::to_json() const {
    nlohmann::json doc;
    doc["dim"] = buckets_;
    doc["K"] = class_count();
    doc["class_names"] = class_names_;
    doc["weights"] = weights_;
    doc["bias"] = bias_;
    doc["training_meta"] = {{"epochs", meta_.epochs},
                            {"learning_rate", meta_.learning_rate},
                            {"initial_loss", meta_.initial_loss},
                            {"final_loss", meta_.final_loss}};
    return doc.dump();
}

TextScorer TextScorer::from_json(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed scorer JSON: ") + e.what(), detail::line_of_offset(json_text, e.byte));
    }
    try {
        TextScorer scorer(doc.at("dim").get<std::size_t>(), doc.at("class_names").get<std::vector<std::string>>());
        if (doc.at("K").get<std::size_t>() != scorer.class_count()) {
            throw ValidationError("scorer K does not match class_names");
        }
        auto weights = doc.at("weights").get<std::vector<double>>();
        auto bias = doc.at("bias").get<std::vector<double>>();
        if (weights.size() != scorer.weights_.size() || bias.size() != scorer.bias_.size()) {
            throw ValidationError("scorer weight shape does not match dim x K");
        }
        for (double w : weights) {
            if (!std::isfinite(w)) throw ValidationError("scorer has non-finite weights");
        }
        scorer.weights_ = std::move(weights);
        scorer.bias_ = std::move(bias);
        if (doc.contains("training_meta")) {
            const auto& m = doc["training_meta"];
            scorer.meta_.epochs = m.value("epochs", std::size_t{0});
            scorer.meta_.learning_rate = m.value("learning_rate", 0.0);
            scorer.meta_.initial_loss = m.value("initial_loss", 0.0);
            scorer.meta_.final_loss = m.value("final_loss", 0.0);
        }
        return scorer;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid scorer JSON: ") + e.what());
    }
}

void TextScorer::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json() << '\n';
}

TextScorer TextScorer::load(const std::filesystem::path& path) { return from_json(detail::read_file(path.string())); }

std::vector<FeaturizedExample> featurize_dataset(std::span<const TrainingExample> dataset, std::size_t buckets) {
    std::vector<FeaturizedExample> out;
    out.reserve(dataset.size());
    for (const auto& ex : dataset) out.push_back({featurize(ex.text, buckets), ex.target.probs()});
    return out;
}

double mean_kl_loss(const TextScorer& scorer, std::span<const FeaturizedExample> data) {
    double total = 0.0;
    for (const auto& ex : data) total += kl_divergence(ex.target, scorer.predict(ex.features));
    return data.empty() ? 0.0 : total / static_cast<double>(data.size());
}

ScorerGradient loss_gradient(const TextScorer& scorer, std::span<const FeaturizedExample> data) {
    const std::size_t k = scorer.class_count();
    ScorerGradient grad{std::vector<double>(scorer.weights().size(), 0.0), std::vector<double>(k, 0.0)};
    if (data.empty()) return grad;
    const double inv_n = 1.0 / static_cast<double>(data.size());
    for (const auto& ex : data) {
        const auto pred = scorer.predict(ex.features);
        for (std::size_t c = 0; c < k; ++c) {
            const double delta = (pred[c] - ex.target[c]) * inv_n;
            grad.bias[c] += delta;
            for (const auto& [bucket, count] : ex.features) {
                grad.weights[static_cast<std::size_t>(bucket) * k + c] += delta * count;
            }
        }
    }
    return grad;
}

TextScorer train_scorer(std::span<const TrainingExample> dataset, const TrainerConfig& config) {
    if (dataset.empty()) {
        throw TrainingError("empty training set", 0);
    }
    const auto& class_names = dataset.front().target.class_names();
    for (const auto& ex : dataset) {
        if (ex.target.class_names() != class_names) {
            throw ValidationError("training targets use different class sets");
        }
    }
    TextScorer scorer(config.buckets, class_names);
    const auto data = featurize_dataset(dataset, config.buckets);
    const std::size_t k = scorer.class_count();

    const double initial = mean_kl_loss(scorer, data);
    if (!std::isfinite(initial)) {
        throw TrainingError("non-finite loss", 0);
    }
    scorer.meta().initial_loss = initial;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto grad = loss_gradient(scorer, data);
        for (std::size_t c = 0; c < k; ++c) scorer.bias()[c] -= config.learning_rate * grad.bias[c];
        auto& w = scorer.weights();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= config.learning_rate * grad.weights[i];

        const double loss = mean_kl_loss(scorer, data);
        if (!std::isfinite(loss)) {
            throw TrainingError("non-finite loss", epoch);
        }
        scorer.meta().final_loss = loss;
    }
    if (config.epochs == 0) scorer.meta().final_loss = initial;
    scorer.meta().epochs = config.epochs;
    scorer.meta().learning_rate = config.learning_rate;
    return scorer;
}

}  // namespace pick
