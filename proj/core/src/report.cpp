// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/report.hpp"

#include <fstream>

#include <json.hpp>

#include "pick/errors.hpp"
#include "text_util.hpp"

namespace pick {

using nlohmann::json;

namespace {

json box_json(const std::optional<BoundingBox>& box) {
    if (!box) return nullptr;
    return json::array({box->x_min, box->y_min, box->x_max, box->y_max});
}

std::optional<BoundingBox> box_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return BoundingBox{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

json dist_json(const std::optional<EmotionDistribution>& d) {
    if (!d) return nullptr;
    return d->probs();
}

std::optional<EmotionDistribution> dist_from(const json& j, const std::vector<std::string>& names) {
    if (j.is_null()) return std::nullopt;
    return EmotionDistribution(names, j.get<std::vector<double>>());
}

template <typename T>
json optional_json(const std::optional<T>& v) {
    if (!v) return nullptr;
    return *v;
}

json evidence_json(const FeatureEvidence& e) {
    return json{{"feature", e.feature},       {"description", e.description}, {"p_mllm", e.mllm.probs()},
                {"confidence", e.confidence}, {"p_kb", e.kb.probs()},         {"similarity", e.similarity},
                {"fused", e.fused.probs()},   {"kb_head", e.kb_head},         {"kb_tail", e.kb_tail}};
}

FeatureEvidence evidence_from(const json& j, const std::vector<std::string>& names) {
    return FeatureEvidence{j.at("feature").get<std::string>(),
                           j.at("description").get<std::string>(),
                           EmotionDistribution(names, j.at("p_mllm").get<std::vector<double>>()),
                           j.at("confidence").get<double>(),
                           EmotionDistribution(names, j.at("p_kb").get<std::vector<double>>()),
                           j.at("similarity").get<double>(),
                           EmotionDistribution(names, j.at("fused").get<std::vector<double>>()),
                           j.at("kb_head").get<std::string>(),
                           j.at("kb_tail").get<std::string>()};
}

json metrics_json(const MetricsReport& m) {
    json per_class = json::array();
    for (const auto& c : m.per_class) {
        per_class.push_back(
            {{"name", c.name}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}});
    }
    return json{{"class_names", m.class_names},
                {"accuracy", m.accuracy},
                {"per_class", per_class},
                {"macro_precision", m.macro_precision},
                {"macro_recall", m.macro_recall},
                {"macro_f1", m.macro_f1},
                {"confusion", m.confusion},
                {"total", m.total}};
}

MetricsReport metrics_from(const json& j) {
    MetricsReport m;
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    m.accuracy = j.at("accuracy").get<double>();
    for (const auto& c : j.at("per_class")) {
        m.per_class.push_back(ClassMetrics{c.at("name").get<std::string>(), c.at("precision").get<double>(),
                                           c.at("recall").get<double>(), c.at("f1").get<double>(),
                                           c.at("support").get<std::size_t>()});
    }
    m.macro_precision = j.at("macro_precision").get<double>();
    m.macro_recall = j.at("macro_recall").get<double>();
    m.macro_f1 = j.at("macro_f1").get<double>();
    m.confusion = j.at("confusion").get<std::vector<std::vector<std::size_t>>>();
    m.total = j.at("total").get<std::size_t>();
    return m;
}

json case_json(const CaseReport& c) {
    json levels = json::array();
    for (const auto& l : c.levels) {
        levels.push_back({{"level", to_string(l.level)},
                          {"count", l.count},
                          {"averaged", dist_json(l.averaged)},
                          {"weight", l.weight}});
    }
    json views = json::array();
    for (const auto& v : c.sub_drawings) {
        json evidence = json::array();
        for (const auto& e : v.evidence) evidence.push_back(evidence_json(e));
        views.push_back({{"level", to_string(v.level)},
                         {"focus_box", box_json(v.focus_box)},
                         {"main_objects", v.main_object_labels},
                         {"neighbors", v.neighbor_labels},
                         {"features", v.features},
                         {"evidence", evidence},
                         {"distribution", dist_json(v.distribution)}});
    }
    json timing{{"backend_calls", c.timing.backend_calls}, {"backend_attempts", c.timing.backend_attempts}};
    if (c.timing.wall_seconds) timing["wall_seconds"] = *c.timing.wall_seconds;
    return json{{"id", c.id},
                {"status", c.errored ? "errored" : "ok"},
                {"error", c.error},
                {"gold_label", optional_json(c.gold_label)},
                {"predicted_label", optional_json(c.predicted_label)},
                {"final_distribution", dist_json(c.final_distribution)},
                {"levels", levels},
                {"sub_drawings", views},
                {"timing", timing}};
}

CaseReport case_from(const json& j, const std::vector<std::string>& names) {
    CaseReport c;
    c.id = j.at("id").get<std::string>();
    c.errored = j.at("status").get<std::string>() == "errored";
    c.error = j.at("error").get<std::string>();
    if (!j.at("gold_label").is_null()) c.gold_label = j["gold_label"].get<std::string>();
    if (!j.at("predicted_label").is_null()) c.predicted_label = j["predicted_label"].get<std::string>();
    c.final_distribution = dist_from(j.at("final_distribution"), names);
    for (const auto& l : j.at("levels")) {
        c.levels.push_back(LevelReport{view_level_from_string(l.at("level").get<std::string>()),
                                       l.at("count").get<std::size_t>(), dist_from(l.at("averaged"), names),
                                       l.at("weight").get<double>()});
    }
    for (const auto& v : j.at("sub_drawings")) {
        SubDrawingReport s;
        s.level = view_level_from_string(v.at("level").get<std::string>());
        s.focus_box = box_from(v.at("focus_box"));
        s.main_object_labels = v.at("main_objects").get<std::vector<std::string>>();
        s.neighbor_labels = v.at("neighbors").get<std::vector<std::string>>();
        s.features = v.at("features").get<std::vector<std::string>>();
        for (const auto& e : v.at("evidence")) s.evidence.push_back(evidence_from(e, names));
        s.distribution = dist_from(v.at("distribution"), names);
        c.sub_drawings.push_back(std::move(s));
    }
    const auto& t = j.at("timing");
    c.timing.backend_calls = t.at("backend_calls").get<std::size_t>();
    c.timing.backend_attempts = t.at("backend_attempts").get<std::size_t>();
    if (t.contains("wall_seconds")) c.timing.wall_seconds = t["wall_seconds"].get<double>();
    return c;
}

json parse_or_throw(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed ") + what + ": " + e.what(), detail::line_of_offset(text, e.byte));
    }
}

}  // namespace

std::optional<MetricsReport> metrics_for_cases(const std::vector<CaseReport>& cases,
                                               const std::vector<std::string>& class_names) {
    std::vector<LabelPair> pairs;
    for (const auto& c : cases) {
        if (c.errored || !c.gold_label || !c.predicted_label) continue;
        pairs.emplace_back(*c.gold_label, *c.predicted_label);
    }
    if (pairs.empty()) return std::nullopt;
    return compute_metrics(pairs, class_names);
}

std::string to_json(const RunReport& report) {
    json cases = json::array();
    for (const auto& c : report.cases) cases.push_back(case_json(c));
    json doc{{"task", report.task},
             {"class_names", report.class_names},
             {"seed", report.seed},
             {"cases", cases},
             {"case_count", report.cases.size()},
             {"errored_count", report.errored_count},
             {"metrics", report.metrics ? metrics_json(*report.metrics) : json(nullptr)}};
    return doc.dump(2) + "\n";
}

RunReport parse_run_report(std::string_view json_text) {
    const json doc = parse_or_throw(json_text, "run report");
    try {
        RunReport r;
        r.task = doc.at("task").get<std::string>();
        r.class_names = doc.at("class_names").get<std::vector<std::string>>();
        r.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& c : doc.at("cases")) r.cases.push_back(case_from(c, r.class_names));
        r.errored_count = doc.at("errored_count").get<std::size_t>();
        if (!doc.at("metrics").is_null()) r.metrics = metrics_from(doc["metrics"]);
        return r;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid run report: ") + e.what());
    }
}

RunReport load_run_report(const std::filesystem::path& path) {
    return parse_run_report(detail::read_file(path.string()));
}

std::string to_json(const MetricsReport& metrics) { return metrics_json(metrics).dump(2) + "\n"; }

MetricsReport parse_metrics_report(std::string_view json_text) {
    const json doc = parse_or_throw(json_text, "metrics report");
    try {
        return metrics_from(doc);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("invalid metrics report: ") + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace pick
