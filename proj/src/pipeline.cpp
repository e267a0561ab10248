#include "lyrictk/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "lyrictk/jsonl.hpp"
#include "lyrictk/metrics.hpp"
#include "lyrictk/textnorm.hpp"

namespace lyrictk {

using json = nlohmann::ordered_json;

void PipelineConfig::validate() const {
    if (num_runs < 3 || num_runs > 5) {
        throw ConfigError("num_runs must be between 3 and 5");
    }
    if (no_speech_threshold < 0.0 || no_speech_threshold > 1.0) {
        throw ConfigError("no_speech_threshold must be in [0, 1]");
    }
    if (align_threshold < 0.0 || align_threshold > 1.0) {
        throw ConfigError("align_threshold must be in [0, 1]");
    }
    if (max_char_rate <= 0.0) throw ConfigError("max_char_rate must be positive");
    if (min_total_words > max_total_words) {
        throw ConfigError("min_total_words exceeds max_total_words");
    }
    if (worker_count < 1) throw ConfigError("worker_count must be at least 1");
}

std::vector<CorpusTrack> read_corpus_manifest(const std::string& path,
                                              std::vector<std::string>* warnings) {
    std::vector<CorpusTrack> tracks;
    for (const auto& line : read_jsonl(path, warnings)) {
        const auto& v = line.value;
        if (!v.is_object() || !v.contains("track_id") || !v["track_id"].is_string() ||
            !v.contains("audio") || !v["audio"].is_string()) {
            if (warnings) {
                warnings->push_back(path + " line " + std::to_string(line.line_number) +
                                    ": missing track_id/audio, skipped");
            }
            continue;
        }
        CorpusTrack t;
        t.track_id = v["track_id"].get<std::string>();
        t.audio_ref = v["audio"].get<std::string>();
        if (v.contains("language") && v["language"].is_string()) {
            t.language = v["language"].get<std::string>();
        }
        if (v.contains("ref_lyrics") && v["ref_lyrics"].is_string()) {
            t.ref_lyrics_path = v["ref_lyrics"].get<std::string>();
        }
        if (v.contains("license") && v["license"].is_string()) {
            t.license = v["license"].get<std::string>();
        }
        tracks.push_back(std::move(t));
    }
    return tracks;
}

namespace {

std::string trimmed(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t')) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> candidate_lines(const TranscriptPrediction& pred) {
    std::vector<std::string> lines;
    for (const auto& seg : pred.segments) {
        std::string text = trimmed(seg.text);
        if (!text.empty()) lines.push_back(std::move(text));
    }
    return lines;
}

double raw_extent(const TranscriptPrediction& pred) {
    double end = 0.0;
    for (const auto& seg : pred.segments) end = std::max(end, seg.end_s);
    return end;
}

}  // namespace

TrackOutcome transcribe_track(const CorpusTrack& track, const PipelineConfig& config,
                              const Backends& backends) {
    TrackOutcome out;
    if (!backends.asr) throw ContractError("transcribe_track: no asr backend");
    const bool dataset_mode = config.mode == PromptMode::Kind::dataset;
    if (dataset_mode && !backends.tagger) {
        throw ContractError("transcribe_track: dataset mode needs a tagger backend");
    }
    if (config.ensemble_enabled && !backends.chat) {
        throw ContractError("transcribe_track: ensemble needs a chat backend");
    }

    // The gate only guards dataset construction; benchmark audio is known
    // to contain singing.
    if (dataset_mode) {
        const TagScores scores = backends.tagger->tag(track.audio_ref);
        if (!is_vocal(scores, config.gate)) {
            out.status = TrackOutcome::Status::gated_out;
            return out;
        }
    }

    if (track.language) {
        out.language = *track.language;
    } else {
        out.language = backends.asr->detect_language(track.audio_ref).language;
        out.language_detected = true;
    }

    const std::string prompt =
        config.use_prompt ? localized_prompt(out.language, config.prompt_table) : std::string();

    const int runs = config.ensemble_enabled ? config.num_runs : 1;
    std::vector<TranscriptPrediction> raw(runs);
    std::vector<TranscriptPrediction> filtered(runs);
    for (int i = 0; i < runs; ++i) {
        AsrRequest request;
        request.audio_ref = track.audio_ref;
        request.prompt = prompt;
        request.language_hint = out.language;
        request.run_index = i;
        raw[i] = backends.asr->transcribe(request);
        filtered[i] = filter_segments(raw[i], config.no_speech_threshold);
    }

    std::vector<std::vector<std::string>> candidates;
    std::vector<int> candidate_run;
    for (int i = 0; i < runs; ++i) {
        auto lines = candidate_lines(filtered[i]);
        if (lines.empty()) continue;
        candidates.push_back(std::move(lines));
        candidate_run.push_back(i);
    }

    if (candidates.empty()) {
        // Nothing survived the no-speech filter in any run; there is no
        // point asking the ensemble about nothing.
        out.status = TrackOutcome::Status::invalid;
        out.detail = "all runs empty after no-speech filtering";
        return out;
    }

    const auto adopt_run = [&](int run) {
        out.chosen_run_index = run;
        out.chosen_segments = filtered[run].segments;
        out.duration_s = raw_extent(raw[run]);
    };

    if (candidates.size() == 1 || !config.ensemble_enabled) {
        out.status = TrackOutcome::Status::ok;
        out.lines = candidates.front();
        out.chosen_label = config.ensemble_enabled ? "single_candidate" : "prediction_1";
        adopt_run(candidate_run.front());
        return out;
    }

    const PredictionSet set = make_prediction_set(candidates, out.language);
    PromptMode mode;
    mode.kind = config.mode;
    mode.language = out.language;
    const EnsembleOutcome ens = ensemble(set, mode, *backends.chat);
    out.ensemble_attempts = ens.attempts;

    switch (ens.status) {
        case EnsembleOutcome::Status::invalid:
            out.status = TrackOutcome::Status::invalid;
            out.detail = ens.attempts > 1 ? "ensemble replies unusable" : "ensemble judged all candidates invalid";
            return out;
        case EnsembleOutcome::Status::fallback_used: {
            out.status = TrackOutcome::Status::ok;
            out.lines = ens.lines;
            out.chosen_label = "fallback:prediction_1";
            adopt_run(candidate_run.front());
            return out;
        }
        case EnsembleOutcome::Status::selected: {
            out.status = TrackOutcome::Status::ok;
            out.lines = ens.lines;
            out.chosen_label = ens.chosen_key;
            out.corrected = ens.corrected;
            // Keys are assigned in candidate order: prediction_k is candidate k-1.
            const std::size_t idx = std::stoul(ens.chosen_key.substr(ens.chosen_key.rfind('_') + 1)) - 1;
            adopt_run(candidate_run.at(idx));
            return out;
        }
    }
    return out;
}

bool length_filter(const std::vector<std::string>& lines, const PipelineConfig& config) {
    std::size_t words = 0;
    for (const auto& line : lines) words += tokenize(line).size();
    return words >= config.min_total_words && words <= config.max_total_words;
}

std::string span_locator(const std::string& audio_ref, double start_s, double end_s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "#t=%.3f,%.3f", start_s, end_s);
    return audio_ref + buf;
}

ThankYouResult thank_you_filter(const std::vector<AlignedLine>& lines,
                                const std::string& audio_ref, const std::string& prompt,
                                AsrBackend& asr) {
    ThankYouResult result;
    for (const auto& line : lines) {
        bool drop = false;
        bool flagged = false;
        try {
            AsrRequest request;
            request.audio_ref = span_locator(audio_ref, line.start_s, line.end_s);
            request.prompt = prompt;
            request.run_index = 0;
            const TranscriptPrediction pred = asr.transcribe(request);
            std::string heard;
            for (const auto& seg : pred.segments) {
                if (!heard.empty()) heard += ' ';
                heard += seg.text;
            }
            drop = normalize_for_alignment(heard) == "thank you";
        } catch (const std::exception&) {
            // Cannot confirm the hallucination; keep the line but say so.
            flagged = true;
        }
        if (drop) {
            ++result.dropped;
        } else {
            result.kept.push_back(line);
            if (flagged) ++result.flagged;
        }
    }
    return result;
}

json DatasetEntry::to_json() const {
    json lines_json = json::array();
    for (const auto& line : lines) {
        lines_json.push_back(json{
            {"start_s", line.start_s},
            {"end_s", line.end_s},
            {"text", line.text},
        });
    }
    json provenance{
        {"num_runs", num_runs},
        {"chosen", chosen},
        {"chosen_run_index", chosen_run_index},
        {"corrected", corrected},
        {"ensemble_attempts", ensemble_attempts},
        {"filters",
         json{
             {"lines_in", lines_in},
             {"dropped_alignment", dropped_alignment},
             {"dropped_char_rate", dropped_char_rate},
             {"dropped_thank_you", dropped_thank_you},
             {"thank_you_flagged", thank_you_flagged},
         }},
    };
    return json{
        {"track_id", track_id}, {"language", language},       {"duration_s", duration_s},
        {"lines", lines_json},  {"provenance", provenance},   {"license", license},
    };
}

bool RunManifest::consistent() const {
    const bool tracks_ok = tracks_in == gated_out + errored + invalid + length_filtered +
                                           empty_after_filters + emitted;
    const bool lines_ok = lines_in == lines_dropped_alignment + lines_dropped_char_rate +
                                          lines_dropped_thank_you + lines_emitted;
    return tracks_ok && lines_ok;
}

json RunManifest::to_json() const {
    json langs = json::object();
    for (const auto& [lang, count] : per_language_songs) langs[lang] = count;
    return json{
        {"tracks",
         json{
             {"in", tracks_in},
             {"gated_out", gated_out},
             {"error", errored},
             {"invalid", invalid},
             {"length_filtered", length_filtered},
             {"empty_after_filters", empty_after_filters},
             {"emitted", emitted},
         }},
        {"lines",
         json{
             {"in", lines_in},
             {"dropped_alignment", lines_dropped_alignment},
             {"dropped_char_rate", lines_dropped_char_rate},
             {"dropped_thank_you", lines_dropped_thank_you},
             {"thank_you_flagged", lines_thank_you_flagged},
             {"emitted", lines_emitted},
         }},
        {"per_language_songs", langs},
        {"total_duration_s", total_duration_s},
        {"manifest_lines_skipped", manifest_lines_skipped},
    };
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const int n_threads = static_cast<int>(std::min<std::size_t>(workers, count));
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

// One journal record per finished track: enough to rebuild the manifest and
// the dataset without touching any backend again.
struct TrackRecord {
    std::string track_id;
    std::string status;
    std::string language;
    double duration_s = 0.0;
    std::size_t lines_in = 0;
    std::size_t dropped_alignment = 0;
    std::size_t dropped_char_rate = 0;
    std::size_t dropped_thank_you = 0;
    std::size_t thank_you_flagged = 0;
    std::string detail;
    std::optional<json> entry;

    json to_json() const {
        json j{
            {"track_id", track_id},
            {"status", status},
            {"language", language},
            {"duration_s", duration_s},
            {"lines_in", lines_in},
            {"dropped_alignment", dropped_alignment},
            {"dropped_char_rate", dropped_char_rate},
            {"dropped_thank_you", dropped_thank_you},
            {"thank_you_flagged", thank_you_flagged},
            {"detail", detail},
        };
        if (entry) j["entry"] = *entry;
        return j;
    }

    static TrackRecord from_json(const json& j) {
        if (!j.is_object() || !j.contains("track_id") || !j.contains("status")) {
            throw SchemaError("journal record missing track_id/status");
        }
        TrackRecord r;
        r.track_id = j["track_id"].get<std::string>();
        r.status = j["status"].get<std::string>();
        r.language = j.value("language", std::string());
        r.duration_s = j.value("duration_s", 0.0);
        r.lines_in = j.value("lines_in", std::size_t{0});
        r.dropped_alignment = j.value("dropped_alignment", std::size_t{0});
        r.dropped_char_rate = j.value("dropped_char_rate", std::size_t{0});
        r.dropped_thank_you = j.value("dropped_thank_you", std::size_t{0});
        r.thank_you_flagged = j.value("thank_you_flagged", std::size_t{0});
        r.detail = j.value("detail", std::string());
        if (j.contains("entry")) r.entry = j["entry"];
        return r;
    }
};

TrackRecord process_track(const CorpusTrack& track, const PipelineConfig& config,
                          const Backends& backends) {
    TrackRecord record;
    record.track_id = track.track_id;
    TrackOutcome outcome;
    try {
        outcome = transcribe_track(track, config, backends);
    } catch (const std::exception& e) {
        record.status = "error";
        record.detail = e.what();
        return record;
    }
    record.language = outcome.language;

    switch (outcome.status) {
        case TrackOutcome::Status::gated_out:
            record.status = "gated_out";
            return record;
        case TrackOutcome::Status::invalid:
            record.status = "invalid";
            record.detail = outcome.detail;
            return record;
        case TrackOutcome::Status::error:
            record.status = "error";
            record.detail = outcome.detail;
            return record;
        case TrackOutcome::Status::ok:
            break;
    }

    if (!length_filter(outcome.lines, config)) {
        record.status = "length_filtered";
        return record;
    }

    record.lines_in = outcome.lines.size();
    const AlignmentResult alignment =
        align_lines(outcome.chosen_segments, outcome.lines, config.align_threshold);
    record.dropped_alignment = alignment.dropped.size();

    std::vector<AlignedLine> rate_ok;
    for (const auto& line : alignment.aligned) {
        if (char_rate_ok(line, config.max_char_rate)) {
            rate_ok.push_back(line);
        } else {
            ++record.dropped_char_rate;
        }
    }

    const std::string prompt =
        config.use_prompt ? localized_prompt(outcome.language, config.prompt_table)
                          : std::string();
    ThankYouResult ty;
    try {
        ty = thank_you_filter(rate_ok, track.audio_ref, prompt, *backends.asr);
    } catch (const std::exception& e) {
        record = TrackRecord{};  // keep the line ledger balanced on failure
        record.track_id = track.track_id;
        record.language = outcome.language;
        record.status = "error";
        record.detail = e.what();
        return record;
    }
    record.dropped_thank_you = ty.dropped;
    record.thank_you_flagged = ty.flagged;

    if (ty.kept.empty()) {
        record.status = "empty_after_filters";
        return record;
    }

    DatasetEntry entry;
    entry.track_id = track.track_id;
    entry.language = outcome.language;
    entry.duration_s = outcome.duration_s;
    entry.lines = ty.kept;
    entry.num_runs = config.num_runs;
    entry.chosen = outcome.corrected ? "corrected:" + outcome.chosen_label : outcome.chosen_label;
    entry.chosen_run_index = outcome.chosen_run_index;
    entry.corrected = outcome.corrected;
    entry.ensemble_attempts = outcome.ensemble_attempts;
    entry.lines_in = record.lines_in;
    entry.dropped_alignment = record.dropped_alignment;
    entry.dropped_char_rate = record.dropped_char_rate;
    entry.dropped_thank_you = record.dropped_thank_you;
    entry.thank_you_flagged = record.thank_you_flagged;
    entry.license = track.license.empty() ? config.default_license : track.license;

    record.status = "emitted";
    record.duration_s = outcome.duration_s;
    record.entry = entry.to_json();
    return record;
}

}  // namespace

BuildResult build_dataset(const std::vector<CorpusTrack>& corpus, const PipelineConfig& config,
                          const Backends& backends, const BuildPaths& paths, bool resume,
                          std::size_t manifest_lines_skipped) {
    config.validate();
    if (!backends.asr || !backends.chat || !backends.tagger) {
        throw ConfigError("build_dataset: asr, chat and tagger backends are all required");
    }
    {
        std::set<std::string> seen;
        for (const auto& t : corpus) {
            if (!seen.insert(t.track_id).second) {
                throw ConfigError("duplicate track_id in corpus: " + t.track_id);
            }
        }
    }

    std::vector<std::optional<TrackRecord>> records(corpus.size());

    if (resume) {
        std::ifstream probe(paths.journal_path);
        if (probe) {
            probe.close();
            std::map<std::string, TrackRecord> done;
            for (const auto& line : read_jsonl_strict(paths.journal_path)) {
                try {
                    TrackRecord r = TrackRecord::from_json(line.value);
                    done[r.track_id] = std::move(r);
                } catch (const SchemaError& e) {
                    throw ConfigError(paths.journal_path + " line " +
                                      std::to_string(line.line_number) + ": " + e.what());
                }
            }
            std::set<std::string> corpus_ids;
            for (const auto& t : corpus) corpus_ids.insert(t.track_id);
            for (const auto& [id, _] : done) {
                if (!corpus_ids.count(id)) {
                    throw ConfigError("journal names a track not in the corpus: " + id);
                }
            }
            for (std::size_t i = 0; i < corpus.size(); ++i) {
                const auto it = done.find(corpus[i].track_id);
                if (it != done.end()) records[i] = it->second;
            }
        }
    }

    std::ofstream journal(paths.journal_path, resume ? std::ios::app : std::ios::trunc);
    if (!journal) throw ConfigError("cannot open journal " + paths.journal_path);
    std::mutex journal_mutex;

    parallel_for(corpus.size(), config.worker_count, [&](std::size_t i) {
        if (records[i]) return;  // already journaled by the interrupted run
        TrackRecord record = process_track(corpus[i], config, backends);
        {
            std::lock_guard lock(journal_mutex);
            journal << record.to_json().dump() << '\n';
            journal.flush();
            if (config.log) {
                config.log(record.track_id + ": " + record.status +
                           (record.detail.empty() ? "" : " (" + record.detail + ")"));
            }
        }
        records[i] = std::move(record);
    });

    BuildResult result;
    RunManifest& manifest = result.manifest;
    manifest.tracks_in = corpus.size();
    manifest.manifest_lines_skipped = manifest_lines_skipped;

    std::ofstream dataset(paths.dataset_path, std::ios::trunc);
    if (!dataset) throw ConfigError("cannot open dataset " + paths.dataset_path);
    for (const auto& maybe : records) {
        const TrackRecord& r = *maybe;
        if (r.status == "gated_out") {
            ++manifest.gated_out;
        } else if (r.status == "error") {
            ++manifest.errored;
        } else if (r.status == "invalid") {
            ++manifest.invalid;
        } else if (r.status == "length_filtered") {
            ++manifest.length_filtered;
        } else if (r.status == "empty_after_filters") {
            ++manifest.empty_after_filters;
        } else if (r.status == "emitted") {
            ++manifest.emitted;
        } else {
            throw SchemaError("journal record with unknown status '" + r.status + "'");
        }
        manifest.lines_in += r.lines_in;
        manifest.lines_dropped_alignment += r.dropped_alignment;
        manifest.lines_dropped_char_rate += r.dropped_char_rate;
        manifest.lines_dropped_thank_you += r.dropped_thank_you;
        manifest.lines_thank_you_flagged += r.thank_you_flagged;
        if (r.status == "emitted") {
            const std::size_t n_lines = (*r.entry)["lines"].size();
            manifest.lines_emitted += n_lines;
            manifest.per_language_songs[r.language] += 1;
            manifest.total_duration_s += r.duration_s;
            dataset << r.entry->dump() << '\n';
            ++result.entries_written;
        }
    }
    dataset.flush();

    std::ofstream manifest_out(paths.manifest_path, std::ios::trunc);
    if (!manifest_out) throw ConfigError("cannot open manifest " + paths.manifest_path);
    manifest_out << manifest.to_json().dump(2) << '\n';

    return result;
}

}  // namespace lyrictk
