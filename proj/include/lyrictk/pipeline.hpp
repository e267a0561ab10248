#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyrictk/align.hpp"
#include "lyrictk/asr_backend.hpp"
#include "lyrictk/chat_backend.hpp"
#include "lyrictk/llm_ensemble.hpp"
#include "lyrictk/vocal_gate.hpp"

namespace lyrictk {

struct PipelineConfig {
    PromptMode::Kind mode = PromptMode::Kind::dataset;
    int num_runs = 3;
    double no_speech_threshold = 0.9;
    double align_threshold = 0.2;
    double max_char_rate = 37.5;
    std::size_t min_total_words = 10;
    std::size_t max_total_words = 2000;
    GateConfig gate;
    std::map<std::string, std::string> prompt_table = default_prompt_table();
    bool use_prompt = true;        // off only in the prompt-ablation cell
    bool ensemble_enabled = true;  // off collapses to a single run, no chat
    int worker_count = 4;
    std::string default_license = "unknown";
    std::function<void(const std::string&)> log;  // optional progress sink

    void validate() const;  // throws ConfigError
};

struct Backends {
    AsrBackend* asr = nullptr;
    ChatBackend* chat = nullptr;
    TaggerBackend* tagger = nullptr;
};

struct CorpusTrack {
    std::string track_id;
    std::string audio_ref;
    std::optional<std::string> language;  // skips detection when present
    std::optional<std::string> ref_lyrics_path;
    std::string license;
};

// Corpus manifest JSONL: {"track_id", "audio", "language"?, "ref_lyrics"?,
// "license"?}. Lines missing the required fields are skipped with a warning.
std::vector<CorpusTrack> read_corpus_manifest(const std::string& path,
                                              std::vector<std::string>* warnings);

struct TrackOutcome {
    enum class Status { ok, gated_out, invalid, error };
    Status status = Status::error;
    std::vector<std::string> lines;
    std::string language;
    bool language_detected = false;
    int chosen_run_index = -1;
    std::string chosen_label;  // "prediction_k", "fallback:prediction_1", "single_candidate"
    bool corrected = false;
    int ensemble_attempts = 0;
    std::vector<TranscriptSegment> chosen_segments;  // filtered, of the chosen run
    double duration_s = 0.0;  // extent of the chosen run's raw segments
    std::string detail;       // why invalid / what failed
};

// Gate (dataset mode only), language, localized prompt, num_runs scripted-
// seed transcriptions, per-run no-speech filtering, then the chat ensemble.
// Runs left with no usable segments are dropped from the candidate set; if
// none survive the track is invalid without any chat call, and a single
// survivor is taken as-is since there is nothing to compare it against.
TrackOutcome transcribe_track(const CorpusTrack& track, const PipelineConfig& config,
                              const Backends& backends);

// Total word count across lines inside [min_total_words, max_total_words].
bool length_filter(const std::vector<std::string>& lines, const PipelineConfig& config);

// Media-fragment style span address understood by the backends and mocks.
std::string span_locator(const std::string& audio_ref, double start_s, double end_s);

struct ThankYouResult {
    std::vector<AlignedLine> kept;
    std::size_t dropped = 0;
    std::size_t flagged = 0;  // re-transcription failed, line kept
};

// Second transcription pass over each line's own span; a line goes only
// when that pass comes back as exactly "thank you" after normalization
// (a Whisper hallucination fingerprint). Backend failures keep the line.
ThankYouResult thank_you_filter(const std::vector<AlignedLine>& lines,
                                const std::string& audio_ref, const std::string& prompt,
                                AsrBackend& asr);

struct DatasetEntry {
    std::string track_id;
    std::string language;
    double duration_s = 0.0;
    std::vector<AlignedLine> lines;
    int num_runs = 0;
    std::string chosen;
    int chosen_run_index = -1;
    bool corrected = false;
    int ensemble_attempts = 0;
    std::size_t lines_in = 0;
    std::size_t dropped_alignment = 0;
    std::size_t dropped_char_rate = 0;
    std::size_t dropped_thank_you = 0;
    std::size_t thank_you_flagged = 0;
    std::string license;

    nlohmann::ordered_json to_json() const;
};

struct RunManifest {
    std::size_t tracks_in = 0;
    std::size_t gated_out = 0;
    std::size_t errored = 0;
    std::size_t invalid = 0;
    std::size_t length_filtered = 0;
    std::size_t empty_after_filters = 0;
    std::size_t emitted = 0;
    std::size_t lines_in = 0;  // lines entering alignment
    std::size_t lines_dropped_alignment = 0;
    std::size_t lines_dropped_char_rate = 0;
    std::size_t lines_dropped_thank_you = 0;
    std::size_t lines_thank_you_flagged = 0;
    std::size_t lines_emitted = 0;
    std::map<std::string, std::size_t> per_language_songs;
    double total_duration_s = 0.0;
    std::size_t manifest_lines_skipped = 0;

    bool consistent() const;  // in == out + dropped at both stages
    nlohmann::ordered_json to_json() const;
};

struct BuildPaths {
    std::string dataset_path;
    std::string manifest_path;
    std::string journal_path;
};

struct BuildResult {
    RunManifest manifest;
    std::size_t entries_written = 0;
};

// Batch construction over a worker pool. Per-track results are journaled as
// they complete; the dataset and manifest are written at the end in corpus
// order, so any worker count produces the identical files. With resume=true
// an existing journal is honored: completed tracks are not reprocessed and
// the final output equals an uninterrupted run. A corrupted journal or one
// naming unknown tracks stops the run.
BuildResult build_dataset(const std::vector<CorpusTrack>& corpus, const PipelineConfig& config,
                          const Backends& backends, const BuildPaths& paths, bool resume = false,
                          std::size_t manifest_lines_skipped = 0);

// Shared worker-pool helper; workers <= 1 degrades to an inline loop.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace lyrictk
