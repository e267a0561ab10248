#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lyrictk/backend_util.hpp"

namespace lyrictk {

struct TranscriptSegment {
    double start_s = 0.0;
    double end_s = 0.0;
    std::string text;
    double no_speech_prob = 0.0;
};

struct TranscriptPrediction {
    std::vector<TranscriptSegment> segments;  // sorted by start_s
    std::string detected_language;
    int run_index = 0;
};

struct AsrRequest {
    std::string audio_ref;
    std::string prompt;  // empty means "send no decoder prefix"
    std::optional<std::string> language_hint;
    int run_index = 0;   // doubles as the sampling seed on the wire
};

struct LanguageDetection {
    std::string language;
    double confidence = 0.0;
};

class AsrBackend {
public:
    virtual ~AsrBackend() = default;
    virtual LanguageDetection detect_language(const std::string& audio_ref) = 0;
    virtual TranscriptPrediction transcribe(const AsrRequest& request) = 0;
};

// Decoder prefix per detected language. The shipped table covers the six
// dataset languages; anything unknown falls back to the English prefix.
const std::map<std::string, std::string>& default_prompt_table();
std::string localized_prompt(std::string_view language);
std::string localized_prompt(std::string_view language,
                             const std::map<std::string, std::string>& table);

// Drops segments whose no-speech probability exceeds the threshold
// (strictly greater; a segment exactly at the threshold stays).
TranscriptPrediction filter_segments(TranscriptPrediction prediction, double threshold = 0.9);

// Validates one wire-format transcription body and sorts segments by start.
TranscriptPrediction parse_transcribe_response(const nlohmann::json& body, int run_index);

class HttpAsrBackend : public AsrBackend {
public:
    explicit HttpAsrBackend(std::string base_url, RetryPolicy retry = {});
    LanguageDetection detect_language(const std::string& audio_ref) override;
    TranscriptPrediction transcribe(const AsrRequest& request) override;

private:
    nlohmann::json post_json(const std::string& path, const nlohmann::json& body);

    std::string base_url_;
    RetryPolicy retry_;
};

// Script-driven stand-in keyed by (audio_ref, run_index). A transcription
// entry is either a plain response body or {"with_prompt": ..,
// "without_prompt": ..} when the fixture cares about prompt ablation.
// Unknown refs raise InputError, mirroring unreadable audio.
class MockAsrBackend : public AsrBackend {
public:
    explicit MockAsrBackend(const std::string& script_path);

    LanguageDetection detect_language(const std::string& audio_ref) override;
    TranscriptPrediction transcribe(const AsrRequest& request) override;

    struct Call {
        std::string method;
        std::string audio_ref;
        std::string prompt;
        int run_index = 0;
    };
    std::vector<Call> calls() const;
    std::size_t transcribe_calls() const;
    std::size_t detect_calls() const;

private:
    nlohmann::json script_;
    mutable std::mutex mutex_;
    std::vector<Call> calls_;
};

}  // namespace lyrictk
