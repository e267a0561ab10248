#include "lyrictk/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lyrictk/errors.hpp"
#include "lyrictk/evalharness.hpp"
#include "lyrictk/jsonl.hpp"
#include "lyrictk/llm_ensemble.hpp"
#include "lyrictk/pipeline.hpp"

namespace lyrictk {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kApiKeyEnvVar = "LYRICTK_CHAT_API_KEY";

struct CliOptions {
    std::string config_path;

    std::string asr_endpoint, asr_mock;
    std::string chat_endpoint, chat_mock;
    bool chat_oracle = false;  // built-in min-WER reference-aware client
    std::string tagger_endpoint, tagger_mock;
    double chat_requests_per_minute = 0.0;  // 0 = unthrottled

    PipelineConfig pipeline;
    std::string mode_name;  // empty = per-command default
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool resume = false;
    bool quiet = false;

    // transcribe
    std::string audio;
    std::string track_id;
    std::string manifest_path;

    // evaluate / ablate / gt-experiment
    std::string benchmark_path;
    std::string system_label = "full";
    bool utterance_ensemble = false;
};

void apply_config_file(const json& cfg, CliOptions& o) {
    const auto str = [&](const char* key, std::string& out) {
        if (cfg.contains(key) && cfg[key].is_string()) out = cfg[key].get<std::string>();
    };
    const auto num = [&](const char* key, auto& out) {
        if (cfg.contains(key) && cfg[key].is_number()) {
            out = cfg[key].get<std::decay_t<decltype(out)>>();
        }
    };
    const auto flag = [&](const char* key, bool& out) {
        if (cfg.contains(key) && cfg[key].is_boolean()) out = cfg[key].get<bool>();
    };

    str("asr_endpoint", o.asr_endpoint);
    str("asr_mock", o.asr_mock);
    str("chat_endpoint", o.chat_endpoint);
    str("chat_mock", o.chat_mock);
    flag("chat_oracle", o.chat_oracle);
    str("tagger_endpoint", o.tagger_endpoint);
    str("tagger_mock", o.tagger_mock);
    num("chat_requests_per_minute", o.chat_requests_per_minute);

    num("runs", o.pipeline.num_runs);
    num("no_speech_threshold", o.pipeline.no_speech_threshold);
    num("align_threshold", o.pipeline.align_threshold);
    num("max_char_rate", o.pipeline.max_char_rate);
    num("gate_threshold", o.pipeline.gate.threshold);
    num("min_total_words", o.pipeline.min_total_words);
    num("max_total_words", o.pipeline.max_total_words);
    num("workers", o.pipeline.worker_count);
    flag("use_prompt", o.pipeline.use_prompt);
    flag("ensemble", o.pipeline.ensemble_enabled);
    str("default_license", o.pipeline.default_license);
    str("mode", o.mode_name);
    str("out", o.out_dir);
    num("seed", o.seed);
    flag("quiet", o.quiet);
    flag("utterance_ensemble", o.utterance_ensemble);

    if (cfg.contains("prompt_table") && cfg["prompt_table"].is_object()) {
        for (const auto& [lang, prompt] : cfg["prompt_table"].items()) {
            if (prompt.is_string()) o.pipeline.prompt_table[lang] = prompt.get<std::string>();
        }
    }
    if (cfg.contains("vocal_tags") && cfg["vocal_tags"].is_array()) {
        std::set<std::string> tags;
        for (const auto& t : cfg["vocal_tags"]) {
            if (t.is_string()) tags.insert(t.get<std::string>());
        }
        if (!tags.empty()) o.pipeline.gate.vocal_tags = std::move(tags);
    }
}

// The config file provides defaults, flags override, so the file has to be
// read before CLI11 runs. A bare scan for --config is enough for that.
void preload_config(int argc, const char* const* argv, CliOptions& o) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        std::string path;
        if (arg == "--config" && i + 1 < argc) {
            path = argv[i + 1];
        } else if (arg.rfind("--config=", 0) == 0) {
            path = arg.substr(9);
        }
        if (!path.empty()) {
            apply_config_file(read_json_file(path), o);
            return;
        }
    }
}

// Owns whichever adapters the command asked for; `view()` hands the
// pipeline its non-owning pointers. Mock pointers stay typed so their call
// logs can be dumped afterwards.
struct BackendSet {
    std::unique_ptr<AsrBackend> asr;
    std::unique_ptr<ChatBackend> chat;
    std::unique_ptr<TaggerBackend> tagger;
    std::unique_ptr<TokenBucket> limiter;

    MockAsrBackend* asr_mock = nullptr;
    ScriptedChatClient* chat_mock = nullptr;
    MockTaggerBackend* tagger_mock = nullptr;
    MinWerChatClient* chat_oracle = nullptr;

    Backends view() const { return Backends{asr.get(), chat.get(), tagger.get()}; }
    bool any_mock() const { return asr_mock || chat_mock || tagger_mock; }
};

enum class Need { no, yes };

BackendSet make_backends(const CliOptions& o, Need asr, Need chat, Need tagger,
                         bool allow_oracle = false) {
    BackendSet set;

    const bool has_asr = !o.asr_endpoint.empty() || !o.asr_mock.empty();
    if (!o.asr_endpoint.empty() && !o.asr_mock.empty()) {
        throw ConfigError("choose exactly one of --asr-endpoint / --asr-mock");
    }
    if (asr == Need::yes && !has_asr) {
        throw ConfigError("this command needs --asr-endpoint or --asr-mock");
    }
    if (!o.asr_mock.empty()) {
        auto mock = std::make_unique<MockAsrBackend>(o.asr_mock);
        set.asr_mock = mock.get();
        set.asr = std::move(mock);
    } else if (!o.asr_endpoint.empty()) {
        set.asr = std::make_unique<HttpAsrBackend>(o.asr_endpoint);
    }

    const int chat_choices = int(!o.chat_endpoint.empty()) + int(!o.chat_mock.empty()) +
                             int(allow_oracle && o.chat_oracle);
    if (chat_choices > 1) {
        throw ConfigError("choose exactly one chat backend (--chat-endpoint / --chat-mock" +
                          std::string(allow_oracle ? " / --chat-oracle)" : ")"));
    }
    if (o.chat_oracle && !allow_oracle) {
        throw ConfigError("--chat-oracle only applies to gt-experiment");
    }
    if (chat == Need::yes && chat_choices == 0) {
        throw ConfigError("this command needs a chat backend (--chat-endpoint or --chat-mock)");
    }
    if (allow_oracle && o.chat_oracle) {
        auto oracle = std::make_unique<MinWerChatClient>();
        set.chat_oracle = oracle.get();
        set.chat = std::move(oracle);
    } else if (!o.chat_mock.empty()) {
        auto mock = std::make_unique<ScriptedChatClient>(o.chat_mock);
        set.chat_mock = mock.get();
        set.chat = std::move(mock);
    } else if (!o.chat_endpoint.empty()) {
        const char* key = std::getenv(kApiKeyEnvVar);
        if (o.chat_requests_per_minute > 0.0) {
            set.limiter = std::make_unique<TokenBucket>(o.chat_requests_per_minute,
                                                        o.chat_requests_per_minute);
        }
        set.chat = std::make_unique<HttpChatClient>(o.chat_endpoint, key ? key : "",
                                                    RetryPolicy{}, set.limiter.get());
    }

    if (!o.tagger_endpoint.empty() && !o.tagger_mock.empty()) {
        throw ConfigError("choose exactly one of --tagger-endpoint / --tagger-mock");
    }
    const bool has_tagger = !o.tagger_endpoint.empty() || !o.tagger_mock.empty();
    if (tagger == Need::yes && !has_tagger) {
        throw ConfigError("this command needs --tagger-endpoint or --tagger-mock");
    }
    if (!o.tagger_mock.empty()) {
        auto mock = std::make_unique<MockTaggerBackend>(o.tagger_mock);
        set.tagger_mock = mock.get();
        set.tagger = std::move(mock);
    } else if (!o.tagger_endpoint.empty()) {
        set.tagger = std::make_unique<HttpTaggerBackend>(o.tagger_endpoint);
    }

    return set;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
}

void write_json_file(const fs::path& path, const json& value) {
    write_text_file(path, value.dump(2) + "\n");
}

// Call logs from whatever mocks ran, sorted so output never depends on
// worker interleaving. Tests count calls here instead of scraping logs.
void dump_mock_calls(const fs::path& out_dir, const BackendSet& set) {
    if (!set.any_mock()) return;
    json doc = json::object();
    if (set.asr_mock) {
        auto calls = set.asr_mock->calls();
        std::sort(calls.begin(), calls.end(), [](const auto& a, const auto& b) {
            return std::tie(a.audio_ref, a.method, a.run_index, a.prompt) <
                   std::tie(b.audio_ref, b.method, b.run_index, b.prompt);
        });
        json items = json::array();
        for (const auto& c : calls) {
            items.push_back(json{{"method", c.method},
                                 {"audio", c.audio_ref},
                                 {"prompt", c.prompt},
                                 {"run_index", c.run_index}});
        }
        doc["asr"] = json{{"transcribe_calls", set.asr_mock->transcribe_calls()},
                          {"detect_calls", set.asr_mock->detect_calls()},
                          {"calls", std::move(items)}};
    }
    if (set.chat_mock) {
        auto digests = set.chat_mock->digests();
        std::sort(digests.begin(), digests.end());
        doc["chat"] = json{{"calls", set.chat_mock->call_count()}, {"digests", digests}};
    }
    if (set.tagger_mock) {
        doc["tagger"] = json{{"calls", set.tagger_mock->tag_calls()}};
    }
    write_json_file(out_dir / "mock_calls.json", doc);
}

void finish_options(CliOptions& o, const char* default_mode) {
    if (o.mode_name.empty()) o.mode_name = default_mode;
    if (o.mode_name == "dataset") {
        o.pipeline.mode = PromptMode::Kind::dataset;
    } else if (o.mode_name == "benchmark") {
        o.pipeline.mode = PromptMode::Kind::benchmark;
    } else {
        throw ConfigError("unknown --mode '" + o.mode_name + "' (dataset or benchmark)");
    }
    if (!o.quiet) {
        o.pipeline.log = [](const std::string& msg) { std::cerr << msg << "\n"; };
    }
    o.pipeline.validate();
    fs::create_directories(o.out_dir);
}

void report_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

const char* status_name(TrackOutcome::Status s) {
    switch (s) {
        case TrackOutcome::Status::ok: return "ok";
        case TrackOutcome::Status::gated_out: return "gated_out";
        case TrackOutcome::Status::invalid: return "invalid";
        case TrackOutcome::Status::error: return "error";
    }
    return "error";
}

std::string stem_of(const std::string& audio_ref) {
    const std::string stem = fs::path(audio_ref).stem().string();
    return stem.empty() ? audio_ref : stem;
}

int cmd_transcribe(CliOptions& o) {
    finish_options(o, "benchmark");
    const bool dataset_mode = o.pipeline.mode == PromptMode::Kind::dataset;
    BackendSet set = make_backends(o, Need::yes,
                                   o.pipeline.ensemble_enabled ? Need::yes : Need::no,
                                   dataset_mode ? Need::yes : Need::no);

    if (o.audio.empty() == o.manifest_path.empty()) {
        throw ConfigError("pass exactly one of an audio locator or --manifest");
    }
    std::vector<CorpusTrack> tracks;
    if (!o.audio.empty()) {
        CorpusTrack track;
        track.track_id = o.track_id.empty() ? stem_of(o.audio) : o.track_id;
        track.audio_ref = o.audio;
        tracks.push_back(std::move(track));
    } else {
        std::vector<std::string> warnings;
        tracks = read_corpus_manifest(o.manifest_path, &warnings);
        report_warnings(warnings);
        if (tracks.empty()) throw ConfigError(o.manifest_path + ": no usable tracks");
    }

    const Backends backends = set.view();
    std::size_t succeeded = 0;
    for (const auto& track : tracks) {
        TrackOutcome outcome;
        try {
            outcome = transcribe_track(track, o.pipeline, backends);
        } catch (const std::exception& e) {
            outcome.status = TrackOutcome::Status::error;
            outcome.detail = e.what();
        }

        json provenance{{"track_id", track.track_id},
                        {"audio", track.audio_ref},
                        {"status", status_name(outcome.status)},
                        {"language", outcome.language},
                        {"language_detected", outcome.language_detected},
                        {"num_runs", o.pipeline.ensemble_enabled ? o.pipeline.num_runs : 1},
                        {"chosen", outcome.chosen_label},
                        {"chosen_run_index", outcome.chosen_run_index},
                        {"corrected", outcome.corrected},
                        {"ensemble_attempts", outcome.ensemble_attempts},
                        {"lines", outcome.lines}};
        if (!outcome.detail.empty()) provenance["detail"] = outcome.detail;
        write_json_file(fs::path(o.out_dir) / (track.track_id + ".provenance.json"), provenance);

        if (outcome.status == TrackOutcome::Status::ok) {
            std::string text;
            for (const auto& line : outcome.lines) text += line + "\n";
            write_text_file(fs::path(o.out_dir) / (track.track_id + ".lyrics.txt"), text);
            ++succeeded;
            if (!o.quiet) {
                std::cerr << track.track_id << ": " << outcome.lines.size() << " lines\n";
            }
        } else if (!o.quiet) {
            std::cerr << track.track_id << ": " << status_name(outcome.status)
                      << (outcome.detail.empty() ? "" : " (" + outcome.detail + ")") << "\n";
        }
    }

    dump_mock_calls(o.out_dir, set);
    return succeeded == tracks.size() ? 0 : 1;
}

int cmd_build_dataset(CliOptions& o) {
    finish_options(o, "dataset");
    BackendSet set = make_backends(o, Need::yes, Need::yes, Need::yes);

    std::vector<std::string> warnings;
    const auto corpus = read_corpus_manifest(o.manifest_path, &warnings);
    report_warnings(warnings);
    if (corpus.empty()) throw ConfigError(o.manifest_path + ": no usable tracks");

    const fs::path out(o.out_dir);
    BuildPaths paths{(out / "dataset.jsonl").string(), (out / "run_manifest.json").string(),
                     (out / "journal.jsonl").string()};
    const BuildResult result =
        build_dataset(corpus, o.pipeline, set.view(), paths, o.resume, warnings.size());

    dump_mock_calls(out, set);
    std::cout << "tracks in: " << result.manifest.tracks_in
              << "  emitted: " << result.manifest.emitted
              << "  lines: " << result.manifest.lines_emitted << "\n";
    if (!result.manifest.consistent()) {
        std::cerr << "error: stage counters do not conserve, see " << paths.manifest_path << "\n";
        return 1;
    }
    return 0;
}

EvalOptions eval_options(const CliOptions& o) {
    EvalOptions options;
    options.pipeline = o.pipeline;
    options.system_label = o.system_label;
    options.utterance_ensemble = o.utterance_ensemble;
    options.ensemble_on = o.pipeline.ensemble_enabled;
    options.prompt_on = o.pipeline.use_prompt;
    return options;
}

int cmd_evaluate(CliOptions& o) {
    finish_options(o, "benchmark");
    BackendSet set = make_backends(o, Need::yes, Need::yes, Need::no);

    std::vector<std::string> warnings;
    const auto items = read_benchmark_manifest(o.benchmark_path, &warnings);
    report_warnings(warnings);
    if (items.empty()) throw ConfigError(o.benchmark_path + ": no usable items");

    const EvalReport report = evaluate(items, eval_options(o), set.view());
    const fs::path out(o.out_dir);
    write_json_file(out / "eval_report.json", report.to_json());
    write_text_file(out / "eval_report.txt", report.render_table());
    dump_mock_calls(out, set);
    std::cout << report.render_table();
    return 0;
}

int cmd_ablate(CliOptions& o) {
    finish_options(o, "benchmark");
    BackendSet set = make_backends(o, Need::yes, Need::yes, Need::no);

    std::vector<std::string> warnings;
    const auto items = read_benchmark_manifest(o.benchmark_path, &warnings);
    report_warnings(warnings);
    if (items.empty()) throw ConfigError(o.benchmark_path + ": no usable items");

    const auto reports = ablation_matrix(items, eval_options(o), set.view());
    const fs::path out(o.out_dir);
    for (const auto& report : reports) {
        write_json_file(out / ("ablation_" + report.system_label + ".json"), report.to_json());
        std::printf("%-28s  mean WER %6.2f  pooled %6.2f\n", report.system_label.c_str(),
                    report.corpus.mean_wer * 100.0, report.corpus.pooled_wer * 100.0);
    }
    dump_mock_calls(out, set);
    return 0;
}

// Trims like the pipeline does when turning segments into candidate lines.
std::string trimmed(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

// References may carry lyric lines separated by newlines; one without any
// newline is a single line.
std::vector<std::string> split_reference_lines(const std::string& reference) {
    std::vector<std::string> lines;
    std::string::size_type pos = 0;
    while (pos <= reference.size()) {
        const auto next = reference.find('\n', pos);
        const auto piece =
            trimmed(reference.substr(pos, next == std::string::npos ? next : next - pos));
        if (!piece.empty()) lines.push_back(piece);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return lines;
}

int cmd_gt_experiment(CliOptions& o) {
    finish_options(o, "benchmark");
    BackendSet set = make_backends(o, Need::yes, Need::yes, Need::no, /*allow_oracle=*/true);

    std::vector<std::string> warnings;
    const auto items = read_benchmark_manifest(o.benchmark_path, &warnings);
    report_warnings(warnings);
    if (items.empty()) throw ConfigError(o.benchmark_path + ": no usable items");

    std::vector<GtExperimentItem> corpus;
    for (const auto& item : items) {
        GtExperimentItem exp;
        exp.id = item.item_id;
        exp.ground_truth = split_reference_lines(item.reference);
        if (exp.ground_truth.empty()) {
            std::cerr << "warning: " << item.item_id << ": empty reference, skipped\n";
            continue;
        }

        const std::string prompt =
            o.pipeline.use_prompt ? localized_prompt(item.language, o.pipeline.prompt_table) : "";
        std::vector<std::vector<std::string>> candidates;
        try {
            for (int run = 0; run < o.pipeline.num_runs; ++run) {
                AsrRequest request{item.audio_ref, prompt, item.language, run};
                auto prediction = set.view().asr->transcribe(request);
                prediction = filter_segments(prediction, o.pipeline.no_speech_threshold);
                std::vector<std::string> lines;
                for (const auto& segment : prediction.segments) {
                    auto text = trimmed(segment.text);
                    if (!text.empty()) lines.push_back(std::move(text));
                }
                if (!lines.empty()) candidates.push_back(std::move(lines));
            }
        } catch (const std::exception& e) {
            std::cerr << "warning: " << item.item_id << ": " << e.what() << ", skipped\n";
            continue;
        }
        if (candidates.empty()) {
            std::cerr << "warning: " << item.item_id << ": no candidates, skipped\n";
            continue;
        }
        exp.set = make_prediction_set(candidates, item.language);
        corpus.push_back(std::move(exp));
    }
    if (corpus.empty()) throw ConfigError("no experiment items could be built");

    const PromptMode mode{PromptMode::Kind::benchmark, "en"};
    const GtExperimentResult result = gt_selection_experiment(corpus, mode, *set.chat, o.seed);

    const fs::path out(o.out_dir);
    write_json_file(out / "gt_experiment.json",
                    json{{"items", result.items},
                         {"selected_ground_truth", result.selected_ground_truth},
                         {"selection_rate", result.selection_rate},
                         {"excluded", result.excluded},
                         {"seed", o.seed}});
    dump_mock_calls(out, set);
    std::printf("ground truth selected %zu/%zu  rate %.3f\n", result.selected_ground_truth,
                result.items, result.selection_rate);
    return 0;
}

void add_common_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON config file; flags override its values");
    cmd->add_option("--asr-endpoint", o.asr_endpoint, "Transcription service base URL");
    cmd->add_option("--asr-mock", o.asr_mock, "Scripted transcription fixture (JSON)");
    cmd->add_option("--chat-endpoint", o.chat_endpoint, "Chat completion service base URL");
    cmd->add_option("--chat-mock", o.chat_mock, "Scripted chat fixture (JSON)");
    cmd->add_option("--tagger-endpoint", o.tagger_endpoint, "Audio tagging service base URL");
    cmd->add_option("--tagger-mock", o.tagger_mock, "Scripted tagging fixture (JSON)");
    cmd->add_option("--runs", o.pipeline.num_runs, "Transcription runs per track (3-5)");
    cmd->add_option("--no-speech-threshold", o.pipeline.no_speech_threshold,
                    "Drop segments with no-speech probability above this");
    cmd->add_option("--align-threshold", o.pipeline.align_threshold,
                    "Max normalized edit distance for a line to keep its timestamps");
    cmd->add_option("--max-char-rate", o.pipeline.max_char_rate,
                    "Max characters per second for an aligned line");
    cmd->add_option("--gate-threshold", o.pipeline.gate.threshold,
                    "Min vocal tag probability for a track to pass the gate");
    cmd->add_option("--mode", o.mode_name, "Prompting mode")
        ->check(CLI::IsMember({"dataset", "benchmark"}));
    cmd->add_option("--workers", o.pipeline.worker_count, "Concurrent track workers");
    cmd->add_option("--seed", o.seed, "Seed for randomized placements");
    cmd->add_option("--out", o.out_dir, "Output directory");
    cmd->add_flag("--quiet", o.quiet, "Suppress progress logging");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CliOptions o;
    try {
        preload_config(argc, argv, o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"Lyrics transcription pipeline: prompted multi-run ASR, chat-based candidate "
                 "selection, timestamp alignment, dataset construction, WER evaluation"};
    app.require_subcommand(1);

    auto* transcribe = app.add_subcommand("transcribe", "Transcribe one track or a manifest");
    transcribe->add_option("audio", o.audio, "Audio locator (path or backend id)");
    transcribe->add_option("--id", o.track_id, "Track id for the output files");
    transcribe->add_option("--manifest", o.manifest_path, "Corpus manifest (JSONL)");
    add_common_flags(transcribe, o);

    auto* build = app.add_subcommand("build-dataset", "Run the full dataset construction batch");
    build->add_option("manifest", o.manifest_path, "Corpus manifest (JSONL)")->required();
    build->add_flag("--resume", o.resume, "Continue from an existing journal");
    add_common_flags(build, o);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score transcriptions against references");
    evaluate_cmd->add_option("manifest", o.benchmark_path, "Benchmark manifest (JSONL)")
        ->required();
    evaluate_cmd->add_option("--label", o.system_label, "System label for the report");
    evaluate_cmd->add_flag("--utterance-ensemble", o.utterance_ensemble,
                           "Run the ensemble on utterance items too");
    add_common_flags(evaluate_cmd, o);

    auto* ablate = app.add_subcommand("ablate", "Evaluate the 2x2 ensemble/prompt ablation");
    ablate->add_option("manifest", o.benchmark_path, "Benchmark manifest (JSONL)")->required();
    add_common_flags(ablate, o);

    auto* gt = app.add_subcommand("gt-experiment",
                                  "Measure how often the ensemble picks a planted ground truth");
    gt->add_option("manifest", o.benchmark_path, "Benchmark manifest (JSONL)")->required();
    gt->add_flag("--chat-oracle", o.chat_oracle,
                 "Use the built-in min-WER selection client instead of a real backend");
    add_common_flags(gt, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (transcribe->parsed()) return cmd_transcribe(o);
        if (build->parsed()) return cmd_build_dataset(o);
        if (evaluate_cmd->parsed()) return cmd_evaluate(o);
        if (ablate->parsed()) return cmd_ablate(o);
        if (gt->parsed()) return cmd_gt_experiment(o);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace lyrictk
