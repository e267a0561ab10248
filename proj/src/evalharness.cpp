#include "lyrictk/evalharness.hpp"

#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "lyrictk/jsonl.hpp"

namespace lyrictk {

using json = nlohmann::ordered_json;

std::vector<BenchmarkItem> read_benchmark_manifest(const std::string& path,
                                                   std::vector<std::string>* warnings) {
    std::vector<BenchmarkItem> items;
    for (const auto& line : read_jsonl(path, warnings)) {
        const auto& v = line.value;
        const auto warn = [&](const char* why) {
            if (warnings) {
                warnings->push_back(path + " line " + std::to_string(line.line_number) + ": " +
                                    why + ", skipped");
            }
        };
        if (!v.is_object() || !v.contains("item_id") || !v["item_id"].is_string() ||
            !v.contains("audio") || !v["audio"].is_string()) {
            warn("missing item_id/audio");
            continue;
        }
        BenchmarkItem item;
        item.item_id = v["item_id"].get<std::string>();
        item.audio_ref = v["audio"].get<std::string>();
        if (v.contains("reference") && v["reference"].is_string()) {
            item.reference = v["reference"].get<std::string>();
        } else if (v.contains("reference_path") && v["reference_path"].is_string()) {
            std::ifstream ref(v["reference_path"].get<std::string>());
            if (!ref) {
                warn("unreadable reference_path");
                continue;
            }
            std::ostringstream buf;
            buf << ref.rdbuf();
            item.reference = buf.str();
        } else {
            warn("missing reference");
            continue;
        }
        if (v.contains("language") && v["language"].is_string()) {
            item.language = v["language"].get<std::string>();
        }
        if (v.contains("granularity") && v["granularity"].is_string()) {
            const std::string g = v["granularity"].get<std::string>();
            if (g == "utterance") {
                item.granularity = BenchmarkItem::Granularity::utterance;
            } else if (g != "song") {
                warn("unknown granularity");
                continue;
            }
        }
        items.push_back(std::move(item));
    }
    return items;
}

EvalReport evaluate(const std::vector<BenchmarkItem>& items, const EvalOptions& options,
                    const Backends& backends) {
    EvalReport report;
    report.system_label = options.system_label;
    report.ensemble_on = options.ensemble_on;
    report.prompt_on = options.prompt_on;

    PipelineConfig config = options.pipeline;
    config.mode = PromptMode::Kind::benchmark;  // no gate, no dataset-only filters
    config.use_prompt = options.prompt_on;
    config.ensemble_enabled = options.ensemble_on;

    auto* reference_aware = dynamic_cast<ReferenceAwareChatBackend*>(backends.chat);
    int workers = config.worker_count;
    if (reference_aware) workers = 1;

    std::vector<CorpusItem> scored(items.size());
    std::vector<std::string> failed(items.size());

    parallel_for(items.size(), workers, [&](std::size_t i) {
        const BenchmarkItem& item = items[i];
        PipelineConfig item_config = config;
        if (item.granularity == BenchmarkItem::Granularity::utterance &&
            !options.utterance_ensemble) {
            item_config.ensemble_enabled = false;  // one plain pass per utterance
        }
        if (reference_aware) reference_aware->set_reference({item.reference});

        CorpusTrack track;
        track.track_id = item.item_id;
        track.audio_ref = item.audio_ref;
        track.language = item.language;

        std::string hypothesis;
        try {
            const TrackOutcome outcome = transcribe_track(track, item_config, backends);
            if (outcome.status == TrackOutcome::Status::ok) {
                for (const auto& line : outcome.lines) {
                    if (!hypothesis.empty()) hypothesis += ' ';
                    hypothesis += line;
                }
            } else {
                failed[i] = item.item_id;  // invalid counts as a miss, not a crash
            }
        } catch (const std::exception&) {
            failed[i] = item.item_id;
        }
        scored[i] = CorpusItem{item.item_id, item.language, item.reference, hypothesis};
    });

    for (const auto& id : failed) {
        if (!id.empty()) report.failed_items.push_back(id);
    }
    report.corpus = corpus_wer(scored);
    return report;
}

std::vector<EvalReport> ablation_matrix(const std::vector<BenchmarkItem>& items,
                                        const EvalOptions& base, const Backends& backends) {
    std::vector<EvalReport> reports;
    const bool cells[4][2] = {{true, true}, {false, true}, {true, false}, {false, false}};
    for (const auto& cell : cells) {
        EvalOptions options = base;
        options.ensemble_on = cell[0];
        options.prompt_on = cell[1];
        options.system_label = std::string(cell[0] ? "ensemble-on" : "ensemble-off") +
                               (cell[1] ? "_prompt-on" : "_prompt-off");
        reports.push_back(evaluate(items, options, backends));
    }
    return reports;
}

json EvalReport::to_json() const {
    json items_json = json::array();
    for (const auto& [id, b] : corpus.per_item) {
        items_json.push_back(json{
            {"id", id},
            {"wer", b.wer},
            {"insertions", b.insertions},
            {"substitutions", b.substitutions},
            {"deletions", b.deletions},
            {"reference_words", b.reference_words},
        });
    }
    json langs = json::object();
    for (const auto& [lang, wer] : corpus.per_language) langs[lang] = wer;
    return json{
        {"system", system_label},
        {"ablation", json{{"ensemble", ensemble_on}, {"prompt", prompt_on}}},
        {"mean_wer", corpus.mean_wer},
        {"pooled_wer", corpus.pooled_wer},
        {"per_language", langs},
        {"items", items_json},
        {"excluded", corpus.excluded},
        {"failed", failed_items},
    };
}

std::string EvalReport::render_table() const {
    char buf[128];
    std::string out;
    out += "System: " + system_label + "\n";
    std::snprintf(buf, sizeof buf, "Items: %zu  Mean WER: %.2f  Pooled WER: %.2f\n",
                  corpus.per_item.size(), corpus.mean_wer * 100.0, corpus.pooled_wer * 100.0);
    out += buf;
    out += "Language         WER\n";
    for (const auto& [lang, wer] : corpus.per_language) {
        std::snprintf(buf, sizeof buf, "%-12s  %6.2f\n", lang.c_str(), wer * 100.0);
        out += buf;
    }
    if (!failed_items.empty()) {
        out += "Failed items:";
        for (const auto& id : failed_items) out += " " + id;
        out += "\n";
    }
    return out;
}

}  // namespace lyrictk
