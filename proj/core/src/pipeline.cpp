// Copyright (C) 2026 The pick authors
// SPDX-License-Identifier: Apache-2.0

#include "pick/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <thread>

#include <json.hpp>

#include "http_client.hpp"
#include "pick/errors.hpp"
#include "text_util.hpp"

namespace pick {

std::string_view to_string(Task task) noexcept { return task == Task::kHtp ? "htp" : "emotion"; }

Task task_from_string(std::string_view name) {
    if (name == "htp") return Task::kHtp;
    if (name == "emotion") return Task::kEmotion;
    throw ValidationError("unknown task '" + std::string(name) + "' (expected htp or emotion)");
}

std::vector<Case> parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                                 std::string_view source) {
    std::vector<Case> cases;
    std::set<std::string> ids;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    const auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const auto line =
            detail::trim(text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos));
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        if (line.empty()) continue;

        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("malformed manifest entry in " + std::string(source) + ": " + e.what(), line_no);
        }
        if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() || !rec.contains("image") ||
            !rec["image"].is_string()) {
            throw ParseError("manifest entry in " + std::string(source) + " needs string id and image", line_no);
        }
        Case c;
        c.id = rec["id"].get<std::string>();
        if (c.id.empty()) {
            throw ParseError("manifest entry in " + std::string(source) + " has an empty id", line_no);
        }
        if (!ids.insert(c.id).second) {
            throw ParseError("duplicate case id '" + c.id + "' in " + std::string(source), line_no);
        }
        c.image = resolve(rec["image"].get<std::string>());
        if (rec.contains("detections") && !rec["detections"].is_null()) {
            if (!rec["detections"].is_string()) {
                throw ParseError("manifest detections must be a string path", line_no);
            }
            c.detections = resolve(rec["detections"].get<std::string>());
        }
        if (rec.contains("label") && !rec["label"].is_null()) {
            if (!rec["label"].is_string()) throw ParseError("manifest label must be a string", line_no);
            c.label = rec["label"].get<std::string>();
        }
        cases.push_back(std::move(c));
    }
    return cases;
}

std::vector<Case> load_manifest(const std::filesystem::path& path) {
    return parse_manifest(detail::read_file(path.string()), path.parent_path(), path.string());
}

PipelineConfig PipelineConfig::for_task(Task task, std::vector<std::string> class_names) {
    PipelineConfig config;
    config.task = task;
    config.class_names = std::move(class_names);
    if (task == Task::kEmotion) config.generic_features.clear();
    return config;
}

Detector make_http_detector(std::string endpoint, std::chrono::milliseconds timeout) {
    detail::parse_url(endpoint);
    return [endpoint = std::move(endpoint), timeout](const Case& c, const Image* image) {
        if (!image) {
            throw ImageError("detection service needs the image of case " + c.id);
        }
        const auto png = encode_png(*image);
        nlohmann::json body{{"image_id", c.id},
                            {"image_base64", detail::base64_encode(std::string_view(
                                                 reinterpret_cast<const char*>(png.data()), png.size()))}};
        const std::string raw = detail::http_post_json(endpoint, body.dump(), {}, timeout);
        return parse_detections(raw, "detection service");
    };
}

namespace {

std::string box_key(const std::optional<BoundingBox>& box) {
    if (!box) return "full";
    return detail::format_double(box->x_min) + "," + detail::format_double(box->y_min) + "," +
           detail::format_double(box->x_max) + "," + detail::format_double(box->y_max);
}

/// Per-case state carried from the sequential feature phase to the analysis phase.
struct CaseWork {
    Case source;
    CaseReport report;
    std::optional<Image> image;
    DecompositionResult decomposition;
    std::vector<ImageRef> single_refs;
    std::vector<ImageRef> multi_refs;
    ImageRef whole_ref;
    std::vector<std::vector<std::string>> features;
    std::map<std::pair<std::size_t, std::string>, std::string> captions;
};

class CaseRunner {
public:
    CaseRunner(const PipelineConfig& config, PipelineResources& resources)
        : config_(config), res_(resources) {}

    void prepare(CaseWork& work) {
        const Case& c = work.source;
        const bool need_image = res_.gateway.wants_image_bytes() || config_.annotated_dir.has_value() ||
                                (!c.detections && res_.detector);
        if (need_image) work.image = load_image(c.image);

        std::vector<Detection> detections;
        if (c.detections) {
            detections = load_detections(*c.detections);
        } else if (res_.detector) {
            detections = res_.detector(c, work.image ? &*work.image : nullptr);
        } else {
            throw DecompositionError("case has no detections file and no detection service is configured");
        }
        work.decomposition = decompose(std::move(detections), c.id, config_.decompose);

        for (std::size_t i = 0; i < work.decomposition.singles.size(); ++i) {
            work.single_refs.push_back(make_ref(work, work.decomposition.singles[i], i));
        }
        for (std::size_t i = 0; i < work.decomposition.multis.size(); ++i) {
            work.multi_refs.push_back(make_ref(work, work.decomposition.multis[i], i));
        }
        work.whole_ref = make_ref(work, work.decomposition.whole, 0);
    }

    void select_features(CaseWork& work) {
        const auto& singles = work.decomposition.singles;
        work.features.resize(singles.size());
        for (std::size_t i = 0; i < singles.size(); ++i) {
            const auto& view = singles[i];
            std::vector<std::string> dynamic;
            if (config_.n_dynamic > 0) {
                if (config_.feature_generator == FeatureGeneratorMode::kPolicy) {
                    const ExcludedSet excluded(config_.generic_features.begin(), config_.generic_features.end());
                    Captioner captioner = [&, i](const SubDrawing&, const std::string& phrase) {
                        return caption(work, i, phrase);
                    };
                    dynamic = extract_features(view, config_.n_dynamic, res_.policy, captioner, res_.scorer,
                                               excluded, config_.adaptation);
                } else {
                    dynamic = generate_features(work, i);
                }
            }
            auto& features = work.features[i];
            features = config_.generic_features;
            features.insert(features.end(), dynamic.begin(), dynamic.end());
        }
    }

    void analyze(CaseWork& work) {
        const auto& names = config_.class_names;
        const auto& dec = work.decomposition;
        std::vector<EmotionDistribution> single_dists;
        for (std::size_t i = 0; i < dec.singles.size(); ++i) {
            SubDrawingReport view = view_report(dec.singles[i]);
            view.features = work.features[i];
            if (view.features.empty()) {
                throw AggregationError("single-object view has no features to analyze");
            }
            for (const auto& feature : view.features) {
                const std::string description = caption(work, i, feature);
                const auto resp = query(work, TemplateId::kSobjPredict, {{"attribute", feature}, {"text", description}},
                                        &work.single_refs[i]);
                const auto mllm = response_distribution(resp, names);
                const double confidence = response_confidence(resp);
                const auto kb = kb_predict(res_.kb, res_.embedder, description);
                const auto& record = res_.kb.records()[kb.index];
                view.evidence.push_back(FeatureEvidence{feature, description, mllm, confidence, kb.distribution,
                                                        kb.similarity,
                                                        fuse_feature(mllm, confidence, kb.distribution, kb.similarity),
                                                        record.head, record.tail});
            }
            view.distribution = aggregate_subdrawing(view.evidence);
            single_dists.push_back(*view.distribution);
            work.report.sub_drawings.push_back(std::move(view));
        }

        std::vector<EmotionDistribution> multi_dists;
        for (std::size_t i = 0; i < dec.multis.size(); ++i) {
            SubDrawingReport view = view_report(dec.multis[i]);
            view.distribution =
                response_distribution(query(work, TemplateId::kMobjPredict, {}, &work.multi_refs[i]), names);
            multi_dists.push_back(*view.distribution);
            work.report.sub_drawings.push_back(std::move(view));
        }

        SubDrawingReport whole = view_report(dec.whole);
        whole.distribution = response_distribution(query(work, TemplateId::kWholePredict, {}, &work.whole_ref), names);
        const EmotionDistribution whole_dist = *whole.distribution;
        work.report.sub_drawings.push_back(std::move(whole));

        std::vector<LevelSummary> levels;
        levels.push_back(summarize_level(ViewLevel::kSingleObject, std::move(single_dists)));
        levels.push_back(summarize_level(ViewLevel::kMultiObject, std::move(multi_dists)));
        levels.push_back(summarize_level(ViewLevel::kWhole, {whole_dist}));
        const auto weights = level_weights(levels, config_.weighting());
        auto final = final_prediction(std::move(levels), weights);

        for (const auto& l : final.levels) {
            work.report.levels.push_back(LevelReport{l.level, l.count, l.averaged, l.weight});
        }
        work.report.final_distribution = final.distribution;
        work.report.predicted_label = final.label;
    }

private:
    ImageRef make_ref(CaseWork& work, const SubDrawing& view, std::size_t index) {
        ImageRef ref;
        ref.id = work.source.id + "|" + std::string(to_string(view.level)) + "|" + box_key(view.focus_box);
        if (!work.image) return ref;
        const Image annotated = view.focus_box ? annotate_focus(*work.image, *view.focus_box) : *work.image;
        if (res_.gateway.wants_image_bytes()) ref.png = encode_png(annotated);
        if (config_.annotated_dir) {
            std::filesystem::create_directories(*config_.annotated_dir);
            save_png(annotated, *config_.annotated_dir /
                                    (work.source.id + "_" + std::string(to_string(view.level)) + "_" +
                                     std::to_string(index) + ".png"));
        }
        return ref;
    }

    BackendResponse query(CaseWork& work, TemplateId id, const SlotMap& slots, const ImageRef* image) {
        auto resp = res_.gateway.query(id, slots, image);
        ++work.report.timing.backend_calls;
        work.report.timing.backend_attempts += static_cast<std::size_t>(resp.attempts);
        return resp;
    }

    std::string caption(CaseWork& work, std::size_t view_index, const std::string& feature) {
        const auto key = std::make_pair(view_index, feature);
        if (const auto it = work.captions.find(key); it != work.captions.end()) return it->second;
        const auto& view = work.decomposition.singles[view_index];
        const auto resp = query(work, TemplateId::kSobjCaption,
                                {{"object", view.main_object_labels.front()}, {"attribute", feature}},
                                &work.single_refs[view_index]);
        return work.captions.emplace(key, response_text(resp)).first->second;
    }

    std::vector<std::string> generate_features(CaseWork& work, std::size_t view_index) {
        const auto& view = work.decomposition.singles[view_index];
        std::vector<std::string> excluded = config_.generic_features;
        std::vector<std::string> out;
        for (std::size_t slot = 0; slot < config_.n_dynamic; ++slot) {
            const std::string listed = excluded.empty() ? "none" : detail::join(excluded, ", ");
            std::string phrase;
            try {
                phrase = response_text(query(work, TemplateId::kFeatureGen,
                                             {{"object", view.main_object_labels.front()}, {"excluded_features", listed}},
                                             &work.single_refs[view_index]));
            } catch (const BackendError& e) {
                throw BackendError("feature slot " + std::to_string(slot) + ": " + e.what(), e.kind(),
                                   e.last_raw_text(), e.attempts());
            }
            excluded.push_back(phrase);
            out.push_back(std::move(phrase));
        }
        return out;
    }

    static SubDrawingReport view_report(const SubDrawing& view) {
        SubDrawingReport r;
        r.level = view.level;
        r.focus_box = view.focus_box;
        r.main_object_labels = view.main_object_labels;
        r.neighbor_labels = view.neighbor_labels;
        return r;
    }

    const PipelineConfig& config_;
    PipelineResources& res_;
};

template <typename Fn>
void run_guarded(CaseWork& work, Fn&& fn) {
    if (work.report.errored) return;
    try {
        fn();
    } catch (const std::exception& e) {
        work.report.errored = true;
        work.report.error = e.what();
        work.report.levels.clear();
        work.report.sub_drawings.clear();
        work.report.final_distribution.reset();
        work.report.predicted_label.reset();
    }
}

}  // namespace

RunReport run_corpus(std::vector<Case> cases, const PipelineConfig& config, PipelineResources& resources) {
    if (config.class_names.size() < 2) {
        throw ValidationError("a task needs at least two classes");
    }
    if (resources.gateway.templates().class_names() != config.class_names) {
        throw ValidationError("prompt templates and pipeline use different class lists");
    }
    if (resources.kb.class_names() != config.class_names) {
        throw ValidationError("knowledge base soft labels and pipeline use different class lists");
    }
    if (resources.scorer.class_names() != config.class_names) {
        throw ValidationError("reward scorer and pipeline use different class lists");
    }
    std::set<std::string> ids;
    for (const auto& c : cases) {
        if (!ids.insert(c.id).second) throw ValidationError("duplicate case id '" + c.id + "'");
        if (c.label && std::find(config.class_names.begin(), config.class_names.end(), *c.label) ==
                           config.class_names.end()) {
            throw ValidationError("case '" + c.id + "' has label '" + *c.label + "' outside the task classes");
        }
    }
    std::sort(cases.begin(), cases.end(), [](const Case& a, const Case& b) { return a.id < b.id; });

    std::vector<CaseWork> work(cases.size());
    for (std::size_t i = 0; i < cases.size(); ++i) {
        work[i].source = std::move(cases[i]);
        work[i].report.id = work[i].source.id;
        work[i].report.gold_label = work[i].source.label;
    }

    CaseRunner runner(config, resources);
    std::vector<double> elapsed(work.size(), 0.0);
    const auto timed = [&](std::size_t i, auto&& fn) {
        const auto start = std::chrono::steady_clock::now();
        run_guarded(work[i], fn);
        elapsed[i] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    // The feature policy is shared across cases, so adaptation runs in case order.
    for (std::size_t i = 0; i < work.size(); ++i) {
        timed(i, [&] {
            runner.prepare(work[i]);
            runner.select_features(work[i]);
        });
    }

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < work.size(); i = next++) {
            timed(i, [&] { runner.analyze(work[i]); });
        }
    };
    const std::size_t threads = std::min(std::max<std::size_t>(1, config.case_concurrency), work.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    RunReport report;
    report.task = std::string(to_string(config.task));
    report.class_names = config.class_names;
    report.seed = config.seed;
    for (std::size_t i = 0; i < work.size(); ++i) {
        if (config.record_wall_time) work[i].report.timing.wall_seconds = elapsed[i];
        if (work[i].report.errored) ++report.errored_count;
        report.cases.push_back(std::move(work[i].report));
    }
    report.metrics = metrics_for_cases(report.cases, report.class_names);
    return report;
}

}  // namespace pick
