// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/metrics.hpp"

#include <algorithm>

#include "pick/errors.hpp"

namespace pick {

namespace {

std::size_t class_index(const std::vector<std::string>& names, const std::string& label) {
    const auto it = std::find(names.begin(), names.end(), label);
    if (it == names.end()) {
        throw MetricsError("label '" + label + "' is not one of the task classes");
    }
    return static_cast<std::size_t>(it - names.begin());
}

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport compute_metrics(std::span<const LabelPair> pairs, const std::vector<std::string>& class_names) {
    if (pairs.empty()) {
        throw MetricsError("no labelled predictions to score");
    }
    if (class_names.empty()) {
        throw MetricsError("no classes");
    }
    const std::size_t k = class_names.size();
    MetricsReport r;
    r.class_names = class_names;
    r.confusion.assign(k, std::vector<std::size_t>(k, 0));
    for (const auto& [gold, pred] : pairs) {
        ++r.confusion[class_index(class_names, gold)][class_index(class_names, pred)];
    }
    r.total = pairs.size();

    std::size_t correct = 0;
    for (std::size_t c = 0; c < k; ++c) correct += r.confusion[c][c];
    r.accuracy = ratio(correct, r.total);

    for (std::size_t c = 0; c < k; ++c) {
        std::size_t predicted = 0;
        std::size_t actual = 0;
        for (std::size_t o = 0; o < k; ++o) {
            predicted += r.confusion[o][c];
            actual += r.confusion[c][o];
        }
        ClassMetrics m;
        m.name = class_names[c];
        m.precision = ratio(r.confusion[c][c], predicted);
        m.recall = ratio(r.confusion[c][c], actual);
        m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        m.support = actual;
        r.macro_precision += m.precision;
        r.macro_recall += m.recall;
        r.macro_f1 += m.f1;
        r.per_class.push_back(std::move(m));
    }
    r.macro_precision /= static_cast<double>(k);
    r.macro_recall /= static_cast<double>(k);
    r.macro_f1 /= static_cast<double>(k);
    return r;
}

}  // namespace pick
