#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lyrictk/metrics.hpp"
#include "lyrictk/pipeline.hpp"

namespace lyrictk {

struct BenchmarkItem {
    enum class Granularity { song, utterance };
    std::string item_id;
    std::string audio_ref;
    std::string reference;
    std::string language = "en";
    Granularity granularity = Granularity::song;
};

// Benchmark manifest JSONL: {"item_id", "audio", "reference" (or
// "reference_path"), "language"?, "granularity"?}. Bad lines are skipped
// with a warning.
std::vector<BenchmarkItem> read_benchmark_manifest(const std::string& path,
                                                   std::vector<std::string>* warnings);

struct EvalOptions {
    PipelineConfig pipeline;
    bool ensemble_on = true;
    bool prompt_on = true;
    bool utterance_ensemble = false;  // utterances default to one plain pass
    std::string system_label = "full";
};

struct EvalReport {
    std::string system_label;
    bool ensemble_on = true;
    bool prompt_on = true;
    CorpusWerReport corpus;
    std::vector<std::string> failed_items;  // scored as WER 1.0 via empty hypothesis

    nlohmann::ordered_json to_json() const;
    std::string render_table() const;  // fixed-width summary, WER in percent
};

// Transcribes every item with the configured ablation switches and scores
// the hypotheses. Items whose backends fail outright stay in the report
// with an empty hypothesis (WER exactly 1.0) and are listed as failed.
// A reference-aware chat client forces single-worker execution so each
// item's reference is in place for its own ensemble call.
EvalReport evaluate(const std::vector<BenchmarkItem>& items, const EvalOptions& options,
                    const Backends& backends);

// The 2x2 of {ensemble on/off} x {prompt on/off}, in that nesting order.
std::vector<EvalReport> ablation_matrix(const std::vector<BenchmarkItem>& items,
                                        const EvalOptions& base, const Backends& backends);

}  // namespace lyrictk
