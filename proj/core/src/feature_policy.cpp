// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/feature_policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "pick/errors.hpp"
#include "pick/hashing.hpp"
#include "text_util.hpp"

namespace pick {

FeatureVocabulary::FeatureVocabulary(std::map<std::string, std::vector<std::string>> phrases) {
    if (phrases.empty()) {
        throw ValidationError("feature vocabulary has no categories");
    }
    for (auto& [category, list] : phrases) {
        if (list.size() < kMinPhrases) {
            throw ValidationError("vocabulary category '" + category + "' needs at least " +
                                  std::to_string(kMinPhrases) + " phrases");
        }
        std::set<std::string> seen;
        for (const auto& p : list) {
            if (detail::trim(p).empty()) {
                throw ValidationError("vocabulary category '" + category + "' has an empty phrase");
            }
            if (!seen.insert(p).second) {
                throw ValidationError("vocabulary category '" + category + "' repeats phrase '" + p + "'");
            }
        }
        phrases_.emplace(detail::to_lower(category), std::move(list));
    }
}

FeatureVocabulary FeatureVocabulary::parse(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed vocabulary JSON: ") + e.what(),
                         detail::line_of_offset(json_text, e.byte));
    }
    try {
        return FeatureVocabulary(doc.get<std::map<std::string, std::vector<std::string>>>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("vocabulary must map categories to phrase lists: ") + e.what());
    }
}

FeatureVocabulary FeatureVocabulary::load(const std::filesystem::path& path) {
    return parse(detail::read_file(path.string()));
}

std::string FeatureVocabulary::category_for(std::string_view label) const {
    std::string key = detail::to_lower(detail::trim(label));
    if (phrases_.contains(key)) return key;
    if (phrases_.contains(std::string(kFallbackCategory))) return std::string(kFallbackCategory);
    throw ValidationError("no vocabulary for object category '" + std::string(label) + "'");
}

const std::vector<std::string>& FeatureVocabulary::phrases(std::string_view category) const {
    const auto it = phrases_.find(std::string(category));
    if (it == phrases_.end()) {
        throw ValidationError("unknown vocabulary category '" + std::string(category) + "'");
    }
    return it->second;
}

FeaturePolicy::FeaturePolicy(FeatureVocabulary vocabulary, std::uint64_t seed, double learning_rate)
    : vocabulary_(std::move(vocabulary)), seed_(seed), learning_rate_(learning_rate), rng_(seed) {
    for (const auto& [category, list] : vocabulary_.all()) {
        logits_.emplace(category, std::vector<double>(list.size(), 0.0));
    }
}

std::vector<double>& FeaturePolicy::logits(std::string_view category) {
    const auto it = logits_.find(std::string(category));
    if (it == logits_.end()) throw ValidationError("unknown policy category '" + std::string(category) + "'");
    return it->second;
}

const std::vector<double>& FeaturePolicy::logits(std::string_view category) const {
    const auto it = logits_.find(std::string(category));
    if (it == logits_.end()) throw ValidationError("unknown policy category '" + std::string(category) + "'");
    return it->second;
}

namespace {

std::vector<bool> support_mask(const std::vector<std::string>& phrases, const ExcludedSet& excluded) {
    std::vector<bool> mask(phrases.size());
    for (std::size_t i = 0; i < phrases.size(); ++i) mask[i] = !excluded.contains(phrases[i]);
    return mask;
}

std::vector<double> masked_softmax(const std::vector<double>& logits, const std::vector<bool>& mask) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) peak = std::max(peak, logits[i]);
    }
    std::vector<double> p(logits.size(), 0.0);
    if (!std::isfinite(peak)) return p;
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        if (mask[i]) {
            p[i] = std::exp(logits[i] - peak);
            sum += p[i];
        }
    }
    for (double& v : p) v /= sum;
    return p;
}

}  // namespace

std::vector<double> FeaturePolicy::probabilities(std::string_view category, const ExcludedSet& excluded) const {
    return masked_softmax(logits(category), support_mask(vocabulary_.phrases(category), excluded));
}

std::size_t FeaturePolicy::argmax(std::string_view category, const ExcludedSet& excluded) const {
    const auto& lg = logits(category);
    const auto mask = support_mask(vocabulary_.phrases(category), excluded);
    std::size_t best = lg.size();
    for (std::size_t i = 0; i < lg.size(); ++i) {
        if (mask[i] && (best == lg.size() || lg[i] > lg[best])) best = i;
    }
    if (best == lg.size()) {
        throw SamplingError("every phrase of category '" + std::string(category) + "' is excluded");
    }
    return best;
}

std::string FeaturePolicy::to_json() const {
    nlohmann::json doc;
    doc["seed"] = seed_;
    doc["learning_rate"] = learning_rate_;
    doc["vocabulary"] = vocabulary_.all();
    doc["logits"] = logits_;
    std::ostringstream state;
    state << rng_;
    doc["rng_state"] = state.str();
    return doc.dump(2);
}

FeaturePolicy FeaturePolicy::from_json(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed policy checkpoint: ") + e.what(),
                         detail::line_of_offset(json_text, e.byte));
    }
    try {
        FeaturePolicy policy(FeatureVocabulary(doc.at("vocabulary").get<std::map<std::string, std::vector<std::string>>>()),
                             doc.at("seed").get<std::uint64_t>(), doc.at("learning_rate").get<double>());
        for (const auto& [category, values] : doc.at("logits").get<std::map<std::string, std::vector<double>>>()) {
            auto& lg = policy.logits(category);
            if (values.size() != lg.size()) {
                throw ValidationError("checkpoint logits for '" + category + "' do not match the vocabulary");
            }
            for (double v : values) {
                if (!std::isfinite(v)) throw ValidationError("checkpoint has non-finite logits");
            }
            lg = values;
        }
        if (doc.contains("rng_state")) {
            std::istringstream state(doc["rng_state"].get<std::string>());
            state >> policy.rng_;
        }
        return policy;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("invalid policy checkpoint: ") + e.what());
    }
}

void FeaturePolicy::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << to_json() << '\n';
}

FeaturePolicy FeaturePolicy::load(const std::filesystem::path& path) {
    return from_json(detail::read_file(path.string()));
}

std::vector<FeatureCandidate> sample_group(const FeaturePolicy& policy, std::string_view category,
                                           std::size_t group_size, const ExcludedSet& excluded,
                                           std::mt19937_64& rng) {
    if (group_size < 2) {
        throw SamplingError("group size must be at least 2");
    }
    const auto& phrases = policy.vocabulary().phrases(category);
    const auto probs = policy.probabilities(category, excluded);
    if (std::all_of(probs.begin(), probs.end(), [](double p) { return p == 0.0; })) {
        throw SamplingError("every phrase of category '" + std::string(category) + "' is excluded");
    }

    std::vector<FeatureCandidate> group;
    group.reserve(group_size);
    for (std::size_t g = 0; g < group_size; ++g) {
        const double u = unit_interval(rng());
        std::size_t pick = phrases.size();
        double cumulative = 0.0;
        std::size_t last_supported = 0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] <= 0.0) continue;
            last_supported = i;
            cumulative += probs[i];
            if (u < cumulative) {
                pick = i;
                break;
            }
        }
        if (pick == phrases.size()) pick = last_supported;  // u landed in rounding slack
        group.push_back(FeatureCandidate{std::string(category), phrases[pick], pick, probs[pick], 0.0, 0.0});
    }
    return group;
}

std::vector<double> group_advantages(std::span<const double> rewards) {
    if (rewards.size() < 2) {
        throw ValidationError("group advantages need at least 2 rewards");
    }
    const double n = static_cast<double>(rewards.size());
    const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    const double std_pop = std::sqrt(var / n);
    std::vector<double> out;
    out.reserve(rewards.size());
    for (double r : rewards) out.push_back((r - mean) / (std_pop + 1e-8));
    return out;
}

void policy_update(FeaturePolicy& policy, std::string_view category, std::span<const FeatureCandidate> candidates,
                   const ExcludedSet& excluded, double learning_rate) {
    auto& lg = policy.logits(category);
    const auto mask = support_mask(policy.vocabulary().phrases(category), excluded);
    for (const auto& cand : candidates) {
        if (cand.category != category) {
            throw UpdateError("candidate from category '" + cand.category + "' applied to '" +
                              std::string(category) + "'");
        }
        if (cand.advantage == 0.0) continue;
        const auto p = masked_softmax(lg, mask);
        for (std::size_t i = 0; i < lg.size(); ++i) {
            if (!mask[i]) continue;
            const double onehot = i == cand.index ? 1.0 : 0.0;
            lg[i] += learning_rate * cand.advantage * (onehot - p[i]);
        }
    }
    for (double v : lg) {
        if (!std::isfinite(v)) {
            throw UpdateError("non-finite logits after update for category '" + std::string(category) + "'");
        }
    }
}

std::vector<std::string> extract_features(const SubDrawing& view, std::size_t n_dynamic, FeaturePolicy& policy,
                                          const Captioner& captioner, const TextScorer& scorer,
                                          const ExcludedSet& excluded_init, const AdaptationConfig& config) {
    if (n_dynamic == 0) {
        throw ValidationError("extract_features needs n_dynamic >= 1");
    }
    if (view.main_object_labels.empty()) {
        throw ValidationError("sub-drawing has no main object");
    }
    const std::string category = policy.vocabulary().category_for(view.main_object_labels.front());
    const auto& phrases = policy.vocabulary().phrases(category);

    ExcludedSet excluded = excluded_init;
    std::vector<std::string> committed;
    for (std::size_t slot = 0; slot < n_dynamic; ++slot) {
        const std::size_t available = static_cast<std::size_t>(std::count_if(
            phrases.begin(), phrases.end(), [&](const std::string& p) { return !excluded.contains(p); }));
        if (available == 0) {
            throw SamplingError("slot " + std::to_string(slot) + ": every phrase of category '" + category +
                                "' is excluded");
        }
        if (available > 1) {
            for (std::size_t round = 0; round < config.slot_budget; ++round) {
                auto group = sample_group(policy, category, config.group_size, excluded, policy.rng());
                std::vector<double> rewards;
                rewards.reserve(group.size());
                for (auto& cand : group) {
                    std::string caption;
                    try {
                        caption = captioner(view, cand.phrase);
                    } catch (const BackendError& e) {
                        throw BackendError("feature slot " + std::to_string(slot) + ": " + e.what(), e.kind(),
                                           e.last_raw_text(), e.attempts());
                    }
                    cand.reward = reward_score(scorer.score_text(caption));
                    rewards.push_back(cand.reward);
                }
                const auto adv = group_advantages(rewards);
                for (std::size_t i = 0; i < group.size(); ++i) group[i].advantage = adv[i];
                policy_update(policy, category, group, excluded, config.learning_rate);
            }
        }
        const std::string chosen = phrases[policy.argmax(category, excluded)];
        committed.push_back(chosen);
        excluded.insert(chosen);
    }
    return committed;
}

}  // namespace pick
