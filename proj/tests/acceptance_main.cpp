// Acceptance gate for the toolkit. Each numbered check prints one
// [PASS]/[FAIL] line ([SKIP] for the optional live-endpoint check) and the
// binary exits nonzero if anything failed. Everything up to the last check
// runs on scripted backends only: no network, no credentials.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lyrictk/align.hpp"
#include "lyrictk/asr_backend.hpp"
#include "lyrictk/chat_backend.hpp"
#include "lyrictk/errors.hpp"
#include "lyrictk/evalharness.hpp"
#include "lyrictk/jsonl.hpp"
#include "lyrictk/llm_ensemble.hpp"
#include "lyrictk/metrics.hpp"
#include "lyrictk/pipeline.hpp"
#include "lyrictk/textnorm.hpp"
#include "lyrictk/utf8.hpp"
#include "lyrictk/vocal_gate.hpp"
#include "testutil.hpp"

using namespace lyrictk;

namespace {

struct Gate {
    int next_index = 1;
    int failures = 0;

    // A check returns "" when satisfied, otherwise the first violation it saw.
    void run(const std::string& what, const std::function<std::string()>& check,
             double budget_s = 0.0) {
        const int index = next_index++;
        const auto t0 = std::chrono::steady_clock::now();
        std::string problem;
        try {
            problem = check();
        } catch (const std::exception& e) {
            problem = std::string("unexpected exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                .count();
        if (problem.empty() && budget_s > 0.0 && secs >= budget_s) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "took %.2fs, budget %.0fs", secs, budget_s);
            problem = buf;
        }
        if (problem.empty()) {
            std::printf("[PASS] %2d %s (%.2fs)\n", index, what.c_str(), secs);
        } else {
            std::printf("[FAIL] %2d %s: %s (%.2fs)\n", index, what.c_str(), problem.c_str(),
                        secs);
            ++failures;
        }
        std::fflush(stdout);
    }

    void skip(const std::string& what, const std::string& why) {
        std::printf("[SKIP] %2d %s: %s\n", next_index++, what.c_str(), why.c_str());
        std::fflush(stdout);
    }
};

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

// ------------------------------------------------------------ check bodies

std::string check_wer_oracle() {
    std::mt19937_64 rng(20240819);
    for (int i = 0; i < 1000; ++i) {
        const int alphabet = 1 + int(rng() % 5);
        auto ref = testutil::random_tokens(rng, alphabet, 12);
        const auto hyp = testutil::random_tokens(rng, alphabet, 12);
        if (ref.empty()) ref.push_back("a");
        const auto got = word_error_rate(ref, hyp);
        const std::size_t want = testutil::edit_oracle(ref, hyp);
        if (got.edits() != want) {
            return fmt("pair %d: got %zu edits, oracle says %zu", i, got.edits(), want);
        }
    }
    return "";
}

std::string check_levenshtein_oracle() {
    std::mt19937_64 rng(424242);
    for (int i = 0; i < 1000; ++i) {
        const std::string a = testutil::random_text(rng, "abcde", 12);
        const std::string b = testutil::random_text(rng, "abcde", 12);
        const std::vector<char> av(a.begin(), a.end());
        const std::vector<char> bv(b.begin(), b.end());
        const std::size_t want = testutil::edit_oracle(av, bv);
        if (levenshtein(a, b) != want) {
            return fmt("\"%s\" vs \"%s\": got %zu, oracle says %zu", a.c_str(), b.c_str(),
                       levenshtein(a, b), want);
        }
    }
    return "";
}

std::string normalized_alphabet_violation(const std::string& normalized) {
    const std::u32string cps = utf8::decode(normalized);
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const char32_t c = cps[i];
        if (c == U' ') {
            if (i == 0 || i + 1 == cps.size() || cps[i + 1] == U' ') return "stray space";
            continue;
        }
        if (utf8::is_apostrophe(c)) {
            if (i == 0 || i + 1 == cps.size()) return "edge apostrophe";
            continue;
        }
        if (utf8::is_ascii_punct(c)) return "ascii punctuation survived";
        if (c >= U'A' && c <= U'Z') return "ascii uppercase survived";
        if (!(utf8::is_letter(c) || utf8::is_ascii_digit(c) || utf8::is_combining_mark(c))) {
            return fmt("unexpected codepoint U+%04X", unsigned(c));
        }
    }
    return "";
}

std::string check_normalization_properties() {
    const NormalizationRules en;
    const std::string example = normalize_text("Hello, WORLD! 2 \xF0\x9F\x98\x80", en);
    if (example != "hello world two") {
        return fmt("example normalized to \"%s\"", example.c_str());
    }

    static const std::vector<std::string> pieces = {
        "a", "B",  "z", "9", "42", " ", "  ", ".", ",", "!", "'", "\xE2\x80\x99", "-", ";",
        "é", "À",  "ß", "İ", "ς", "Σ", "ж", "Я", "😀", "🎵", "‍", "́",
        "…", "\t", "n", "o", "\xff", "\xc3"};
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
    std::uniform_int_distribution<int> len(0, 24);
    for (int i = 0; i < 10000; ++i) {
        std::string input;
        const int n = len(rng);
        for (int k = 0; k < n; ++k) input += pieces[pick(rng)];

        const std::string once = normalize_text(input, en);
        if (normalize_text(once, en) != once) {
            return fmt("iteration %d: not idempotent on \"%s\"", i, input.c_str());
        }
        const std::string bad = normalized_alphabet_violation(once);
        if (!bad.empty()) return fmt("iteration %d: %s in \"%s\"", i, bad.c_str(), once.c_str());
    }
    return "";
}

std::string check_filter_guarantees() {
    testutil::TempDir dir;
    const auto fx = testutil::make_mock_corpus(dir.path());
    const auto corpus = read_corpus_manifest(fx.corpus_path, nullptr);
    if (corpus.size() != 50) return fmt("fixture corpus has %zu tracks", corpus.size());

    MockAsrBackend asr(fx.asr_path);
    ScriptedChatClient chat(fx.chat_path);
    MockTaggerBackend tagger(fx.tagger_path);
    PipelineConfig config;
    config.worker_count = 4;
    BuildPaths paths{dir.str("dataset.jsonl"), dir.str("manifest.json"),
                     dir.str("journal.jsonl")};
    const auto result = build_dataset(corpus, config, {&asr, &chat, &tagger}, paths);

    if (!result.manifest.consistent()) return "manifest counters do not conserve";
    const std::string diff = testutil::manifest_diff(result.manifest, fx.expected);
    if (!diff.empty()) return "manifest drifted from fixture tallies: " + diff;

    std::map<std::string, std::string> audio_of;
    for (const auto& t : corpus) audio_of[t.track_id] = t.audio_ref;

    const auto script = read_json_file(fx.asr_path);
    std::size_t lines_seen = 0;
    std::size_t entries_seen = 0;
    for (const auto& row : read_jsonl_strict(paths.dataset_path)) {
        ++entries_seen;
        const auto& entry = row.value;
        const std::string id = entry["track_id"].get<std::string>();
        const int run = entry["provenance"]["chosen_run_index"].get<int>();
        auto body = script["transcribe"][audio_of[id]][std::to_string(run)];
        if (body.contains("with_prompt")) body = body["with_prompt"];

        for (const auto& line : entry["lines"]) {
            ++lines_seen;
            const double start = line["start_s"].get<double>();
            const double end = line["end_s"].get<double>();
            const std::string text = line["text"].get<std::string>();

            const nlohmann::ordered_json* source = nullptr;
            for (const auto& seg : body["segments"]) {
                if (std::abs(seg["start"].get<double>() - start) < 1e-9 &&
                    std::abs(seg["end"].get<double>() - end) < 1e-9) {
                    source = &seg;
                    break;
                }
            }
            if (!source) return fmt("%s: no source segment spans [%.3f, %.3f]", id.c_str(),
                                    start, end);

            const double nsp = (*source)["no_speech_prob"].get<double>();
            if (nsp > 0.9 + 1e-12) return fmt("%s: emitted line with nsp %.4f", id.c_str(), nsp);

            const double dist =
                normalized_distance(normalize_for_alignment(text),
                                    normalize_for_alignment((*source)["text"].get<std::string>()));
            if (dist > 0.2 + 1e-12) {
                return fmt("%s: emitted line at distance %.4f", id.c_str(), dist);
            }

            const AlignedLine al{text, start, end, 0, dist};
            if (!char_rate_ok(al, 37.5)) {
                return fmt("%s: emitted line over the character rate", id.c_str());
            }
        }
    }
    if (entries_seen != result.manifest.emitted) {
        return fmt("dataset holds %zu entries, manifest says %zu", entries_seen,
                   result.manifest.emitted);
    }
    if (lines_seen != result.manifest.lines_emitted) {
        return fmt("dataset holds %zu lines, manifest says %zu", lines_seen,
                   result.manifest.lines_emitted);
    }
    if (lines_seen == 0) return "fixture emitted no lines, nothing was checked";
    return "";
}

std::string check_alignment_bruteforce() {
    std::mt19937_64 rng(555001);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t n_lines = rng() % 7;
        const std::size_t n_segs = rng() % 7;
        std::vector<std::string> lines;
        for (std::size_t i = 0; i < n_lines; ++i) {
            lines.push_back(testutil::random_text(rng, "abz", 6));
        }
        std::vector<TranscriptSegment> segs;
        for (std::size_t j = 0; j < n_segs; ++j) {
            segs.push_back({double(j), double(j) + 1.0, testutil::random_text(rng, "abz", 6),
                            0.1});
        }

        std::vector<std::vector<double>> d(n_lines, std::vector<double>(n_segs, 0.0));
        for (std::size_t i = 0; i < n_lines; ++i) {
            for (std::size_t j = 0; j < n_segs; ++j) {
                d[i][j] = normalized_distance(normalize_for_alignment(lines[i]),
                                              normalize_for_alignment(segs[j].text));
            }
        }
        const double threshold = 0.34;
        const auto want = testutil::best_matching_bruteforce(d, threshold);
        const auto got = align_lines(segs, lines, threshold);

        if (got.aligned.size() != want.matches) {
            return fmt("instance %d: matched %zu lines, optimum is %zu", iter,
                       got.aligned.size(), want.matches);
        }
        double total = 0.0;
        for (const auto& a : got.aligned) total += a.distance;
        if (std::abs(total - want.total) > 1e-9) {
            return fmt("instance %d: total distance %.6f, optimum %.6f", iter, total,
                       want.total);
        }
    }
    return "";
}

std::string check_response_roundtrip() {
    const std::vector<std::string> keys = {"prediction_1", "prediction_2", "prediction_3",
                                           "prediction_4"};
    std::mt19937_64 rng(606060);
    for (int i = 0; i < 1000; ++i) {
        EnsembleResponse resp;
        resp.reasons = testutil::random_text(rng, "abc {}\"\\", 12);
        resp.closest_prediction = keys[rng() % keys.size()];
        const std::size_t n_lines = 1 + rng() % 4;
        for (std::size_t k = 0; k < n_lines; ++k) {
            resp.output.push_back("w" + testutil::random_text(rng, "abc'", 6));
        }
        const auto parsed = parse_response(serialize_response(resp), keys);
        if (parsed.reasons != resp.reasons || parsed.closest_prediction !=
                                                  resp.closest_prediction ||
            parsed.output != resp.output) {
            return fmt("iteration %d: round trip changed the response", i);
        }
    }

    EnsembleResponse none;
    none.reasons = "nothing usable";
    none.closest_prediction = kNoneMarker;
    const auto parsed = parse_response(serialize_response(none), keys);
    if (!parsed.is_none() || !parsed.output.empty()) {
        return "the none marker did not survive a round trip";
    }

    const auto rejects = [&](const nlohmann::json& raw) {
        try {
            parse_response(raw.dump(), keys);
            return false;
        } catch (const SchemaError&) {
            return true;
        }
    };
    if (!rejects({{"reasons", "r"}, {"closest_prediction", "None"}, {"output", {"x"}}})) {
        return "a none selection with output lines was accepted";
    }
    if (!rejects({{"reasons", "r"},
                  {"closest_prediction", "prediction_1"},
                  {"output", nlohmann::json::array()}})) {
        return "a selection with empty output was accepted";
    }
    return "";
}

int run_command(const std::string& command) {
    const int raw = std::system(command.c_str());
    if (raw == -1) return -1;
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string check_gt_oracle_cli() {
    testutil::TempDir dir;
    const auto fx = testutil::make_gt_fixture(dir.path(), 20);
    const auto out = dir.str("gt_out");
    const auto log = dir.str("gt.log");
    const std::string command = std::string(LYRICTK_BIN) + " gt-experiment " +
                                fx.benchmark_path + " --asr-mock " + fx.asr_path +
                                " --chat-oracle --seed 11 --out " + out + " --quiet > " + log +
                                " 2>&1";
    const int code = run_command(command);
    if (code != 0) {
        return fmt("exit code %d; output: %s", code, testutil::read_file(log).c_str());
    }

    const auto result = read_json_file(out + "/gt_experiment.json");
    if (result["items"].get<std::size_t>() != 20) {
        return fmt("scored %zu items, wanted 20", result["items"].get<std::size_t>());
    }
    if (!result["excluded"].empty()) return "some items were excluded";
    if (result["selected_ground_truth"].get<std::size_t>() != 20 ||
        std::abs(result["selection_rate"].get<double>() - 1.0) > 1e-12) {
        return fmt("selected %zu/20, rate %.3f",
                   result["selected_ground_truth"].get<std::size_t>(),
                   result["selection_rate"].get<double>());
    }
    return "";
}

std::string check_ablation_directions() {
    testutil::TempDir dir;
    const auto fx = testutil::make_ablation_fixture(dir.path());
    const auto items = read_benchmark_manifest(fx.benchmark_path, nullptr);
    if (items.size() != fx.items) return "fixture manifest did not read back";

    MockAsrBackend asr(fx.asr_path);
    MinWerChatClient chat;
    EvalOptions base;
    base.pipeline.worker_count = 1;
    const auto reports = ablation_matrix(items, base, {&asr, &chat, nullptr});

    std::map<std::string, double> mean;
    for (const auto& r : reports) mean[r.system_label] = r.corpus.mean_wer;
    const auto need = [&](const char* label) -> double {
        const auto it = mean.find(label);
        if (it == mean.end()) throw ContractError(std::string("missing cell ") + label);
        return it->second;
    };
    const double on_on = need("ensemble-on_prompt-on");
    const double off_on = need("ensemble-off_prompt-on");
    const double on_off = need("ensemble-on_prompt-off");
    const double off_off = need("ensemble-off_prompt-off");

    if (on_on > off_on || on_off > off_off) {
        return fmt("ensemble direction violated: %.4f vs %.4f, %.4f vs %.4f", on_on, off_on,
                   on_off, off_off);
    }
    if (on_on > on_off || off_on > off_off) {
        return fmt("prompt direction violated: %.4f vs %.4f, %.4f vs %.4f", on_on, on_off,
                   off_on, off_off);
    }
    if (on_on != 0.0) return fmt("full system scored %.4f, fixture promises 0", on_on);
    if (off_off <= on_on) return "the fixture no longer separates the cells";
    return "";
}

std::string check_determinism_and_resume() {
    testutil::TempDir dir;
    const auto fx = testutil::make_mock_corpus(dir.path());
    const auto corpus = read_corpus_manifest(fx.corpus_path, nullptr);

    const auto build = [&](int workers, const std::string& tag, bool resume) {
        MockAsrBackend asr(fx.asr_path);
        ScriptedChatClient chat(fx.chat_path);
        MockTaggerBackend tagger(fx.tagger_path);
        PipelineConfig config;
        config.worker_count = workers;
        BuildPaths paths{dir.str(tag + ".jsonl"), dir.str(tag + "_manifest.json"),
                         dir.str(tag + "_journal.jsonl")};
        build_dataset(corpus, config, {&asr, &chat, &tagger}, paths, resume);
        return paths;
    };

    const auto solo = build(1, "w1", false);
    const auto pool = build(4, "w4", false);
    if (testutil::read_file(solo.dataset_path).empty()) return "the w1 dataset came out empty";
    if (testutil::read_file(solo.dataset_path) != testutil::read_file(pool.dataset_path)) {
        return "datasets differ between worker counts 1 and 4";
    }
    if (testutil::read_file(solo.manifest_path) != testutil::read_file(pool.manifest_path)) {
        return "manifests differ between worker counts 1 and 4";
    }

    // replay the pool run from a journal cut off after five tracks
    BuildPaths resumed{dir.str("resumed.jsonl"), dir.str("resumed_manifest.json"),
                       dir.str("resumed_journal.jsonl")};
    {
        std::ifstream in(pool.journal_path);
        std::ofstream cut(resumed.journal_path);
        std::string line;
        for (int i = 0; i < 5 && std::getline(in, line); ++i) cut << line << '\n';
    }
    {
        MockAsrBackend asr(fx.asr_path);
        ScriptedChatClient chat(fx.chat_path);
        MockTaggerBackend tagger(fx.tagger_path);
        PipelineConfig config;
        config.worker_count = 4;
        build_dataset(corpus, config, {&asr, &chat, &tagger}, resumed, true);
    }
    if (testutil::read_file(resumed.dataset_path) != testutil::read_file(pool.dataset_path)) {
        return "the resumed dataset differs from the one-shot run";
    }
    if (testutil::read_file(resumed.manifest_path) != testutil::read_file(pool.manifest_path)) {
        return "the resumed manifest differs from the one-shot run";
    }
    return "";
}

std::string check_live_endpoint(const std::string& asr_endpoint,
                                const std::string& chat_endpoint, const std::string& audio) {
    testutil::TempDir dir;
    const auto out = dir.str("live_out");
    const auto log = dir.str("live.log");
    std::string command = std::string(LYRICTK_BIN) + " transcribe " + audio +
                          " --id live_clip --asr-endpoint " + asr_endpoint;
    if (chat_endpoint.empty()) {
        testutil::write_file(dir.str("live.json"), "{\"ensemble\": false}\n");
        command += " --config " + dir.str("live.json");
    } else {
        command += " --chat-endpoint " + chat_endpoint;
    }
    command += " --out " + out + " --quiet > " + log + " 2>&1";
    const int code = run_command(command);
    if (code != 0) {
        return fmt("exit code %d; output: %s", code, testutil::read_file(log).c_str());
    }
    const auto lyrics = testutil::read_file(out + "/live_clip.lyrics.txt");
    if (lyrics.find_first_not_of(" \n\t") == std::string::npos) {
        return "the lyrics file came out empty";
    }

    // the same request through the library, to look at the timestamps
    HttpAsrBackend asr(asr_endpoint);
    CorpusTrack track;
    track.track_id = "live_clip";
    track.audio_ref = audio;
    PipelineConfig config;
    config.mode = PromptMode::Kind::benchmark;
    config.ensemble_enabled = false;
    const auto outcome = transcribe_track(track, config, {&asr, nullptr, nullptr});
    if (outcome.status != TrackOutcome::Status::ok) {
        return "direct transcription did not come back ok: " + outcome.detail;
    }
    if (outcome.chosen_segments.empty()) return "no segments survived";
    double last_start = -1.0;
    for (const auto& seg : outcome.chosen_segments) {
        if (seg.end_s <= seg.start_s) return "a segment has a non-positive span";
        if (seg.start_s < last_start) return "segment starts go backwards";
        last_start = seg.start_s;
    }
    return "";
}

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value ? value : "";
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    Gate gate;

    gate.run("word error rate edits match the exhaustive oracle on 1000 random pairs",
             check_wer_oracle, 10.0);
    gate.run("character edit distance matches the exhaustive oracle on 1000 fuzzed pairs",
             check_levenshtein_oracle, 10.0);
    gate.run("normalization is idempotent with a closed output alphabet on 10000 strings",
             check_normalization_properties);
    gate.run("every emitted dataset line clears the gate thresholds and counters conserve",
             check_filter_guarantees);
    gate.run("line alignment equals exhaustive enumeration on 100 random instances",
             check_alignment_bruteforce);
    gate.run("selection replies survive serialize/parse round trips, none marker included",
             check_response_roundtrip);
    gate.run("gt-experiment with the oracle judge selects every planted truth on 20 items",
             check_gt_oracle_cli);
    gate.run("ensemble and prompting never hurt the mean score on the ablation corpus",
             check_ablation_directions);
    gate.run("dataset builds are byte-identical across worker counts and across a resume",
             check_determinism_and_resume);

    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                               .count();
    gate.run("the scripted checks finished offline, without credentials, in under 60s",
             [&]() -> std::string {
                 if (elapsed >= 60.0) return fmt("took %.1fs", elapsed);
                 return "";
             });

    const std::string live_asr = env_or_empty("LYRICTK_LIVE_ASR_ENDPOINT");
    const std::string live_chat = env_or_empty("LYRICTK_LIVE_CHAT_ENDPOINT");
    const std::string live_audio = env_or_empty("LYRICTK_LIVE_AUDIO");
    if (live_asr.empty() || live_audio.empty()) {
        gate.skip("live transcription produces non-empty lyrics with ordered timestamps",
                  "set LYRICTK_LIVE_ASR_ENDPOINT and LYRICTK_LIVE_AUDIO to enable");
    } else {
        gate.run("live transcription produces non-empty lyrics with ordered timestamps",
                 [&] { return check_live_endpoint(live_asr, live_chat, live_audio); });
    }

    std::printf("acceptance: %d of %d checks failed\n", gate.failures, gate.next_index - 1);
    return gate.failures == 0 ? 0 : 1;
}
