#include "lyrictk/asr_backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <httplib.h>

namespace lyrictk {

using json = nlohmann::json;

const std::map<std::string, std::string>& default_prompt_table() {
    static const std::map<std::string, std::string> table = {
        {"en", "lyrics:"},  {"fr", "paroles:"}, {"de", "liedtext:"},
        {"es", "letra:"},   {"it", "testo:"},   {"ru", "текст:"},
    };
    return table;
}

std::string localized_prompt(std::string_view language) {
    return localized_prompt(language, default_prompt_table());
}

std::string localized_prompt(std::string_view language,
                             const std::map<std::string, std::string>& table) {
    const auto it = table.find(std::string(language));
    if (it != table.end()) return it->second;
    return "lyrics:";
}

TranscriptPrediction filter_segments(TranscriptPrediction prediction, double threshold) {
    auto& segs = prediction.segments;
    segs.erase(std::remove_if(segs.begin(), segs.end(),
                              [threshold](const TranscriptSegment& s) {
                                  return s.no_speech_prob > threshold;
                              }),
               segs.end());
    return prediction;
}

namespace {

double require_number(const json& obj, const char* key, const char* context) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        throw SchemaError(std::string(context) + ": missing numeric field '" + key + "'");
    }
    const double v = obj[key].get<double>();
    if (!std::isfinite(v)) {
        throw SchemaError(std::string(context) + ": non-finite '" + key + "'");
    }
    return v;
}

std::string require_string(const json& obj, const char* key, const char* context) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw SchemaError(std::string(context) + ": missing string field '" + key + "'");
    }
    return obj[key].get<std::string>();
}

json load_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ConfigError(std::string(what) + ": cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string(what) + ": invalid JSON in " + path + ": " + e.what());
    }
}

}  // namespace

TranscriptPrediction parse_transcribe_response(const json& body, int run_index) {
    if (!body.is_object()) throw SchemaError("transcription response: not a JSON object");
    TranscriptPrediction pred;
    pred.detected_language = require_string(body, "language", "transcription response");
    pred.run_index = run_index;
    if (!body.contains("segments") || !body["segments"].is_array()) {
        throw SchemaError("transcription response: missing 'segments' array");
    }
    for (const auto& s : body["segments"]) {
        TranscriptSegment seg;
        seg.start_s = require_number(s, "start", "segment");
        seg.end_s = require_number(s, "end", "segment");
        seg.text = require_string(s, "text", "segment");
        seg.no_speech_prob = require_number(s, "no_speech_prob", "segment");
        if (seg.start_s < 0.0 || seg.end_s <= seg.start_s) {
            throw SchemaError("segment: bad time span");
        }
        if (seg.no_speech_prob < 0.0 || seg.no_speech_prob > 1.0) {
            throw SchemaError("segment: no_speech_prob out of [0,1]");
        }
        pred.segments.push_back(std::move(seg));
    }
    std::stable_sort(pred.segments.begin(), pred.segments.end(),
                     [](const TranscriptSegment& a, const TranscriptSegment& b) {
                         return a.start_s < b.start_s;
                     });
    return pred;
}

HttpAsrBackend::HttpAsrBackend(std::string base_url, RetryPolicy retry)
    : base_url_(std::move(base_url)), retry_(retry) {}

json HttpAsrBackend::post_json(const std::string& path, const json& body) {
    return with_retries(retry_, [&]() -> json {
        httplib::Client cli(base_url_);
        cli.set_connection_timeout(10, 0);
        cli.set_read_timeout(120, 0);
        auto res = cli.Post(path, body.dump(), "application/json");
        if (!res) {
            throw TransportError("POST " + path + ": " + httplib::to_string(res.error()));
        }
        if (res->status >= 500) {
            throw TransportError("POST " + path + ": HTTP " + std::to_string(res->status));
        }
        if (res->status != 200) {
            throw InputError("POST " + path + ": HTTP " + std::to_string(res->status) +
                             " " + res->body);
        }
        try {
            return json::parse(res->body);
        } catch (const json::parse_error&) {
            throw SchemaError("POST " + path + ": response is not JSON");
        }
    });
}

LanguageDetection HttpAsrBackend::detect_language(const std::string& audio_ref) {
    const json reply = post_json("/detect_language", json{{"audio", audio_ref}});
    LanguageDetection out;
    out.language = require_string(reply, "language", "detect_language response");
    out.confidence = require_number(reply, "probability", "detect_language response");
    return out;
}

TranscriptPrediction HttpAsrBackend::transcribe(const AsrRequest& request) {
    json body{{"audio", request.audio_ref},
              {"prompt", request.prompt},
              {"seed", request.run_index}};
    if (request.language_hint) body["language"] = *request.language_hint;
    return parse_transcribe_response(post_json("/transcribe", body), request.run_index);
}

MockAsrBackend::MockAsrBackend(const std::string& script_path)
    : script_(load_json_file(script_path, "asr mock")) {}

LanguageDetection MockAsrBackend::detect_language(const std::string& audio_ref) {
    {
        std::lock_guard lock(mutex_);
        calls_.push_back({"detect_language", audio_ref, "", 0});
    }
    if (!script_.contains("detect_language") || !script_["detect_language"].contains(audio_ref)) {
        throw InputError("asr mock: no detect_language entry for '" + audio_ref + "'");
    }
    const auto& entry = script_["detect_language"][audio_ref];
    LanguageDetection out;
    out.language = require_string(entry, "language", "detect_language script");
    out.confidence = require_number(entry, "probability", "detect_language script");
    return out;
}

TranscriptPrediction MockAsrBackend::transcribe(const AsrRequest& request) {
    {
        std::lock_guard lock(mutex_);
        calls_.push_back({"transcribe", request.audio_ref, request.prompt, request.run_index});
    }
    if (!script_.contains("transcribe") || !script_["transcribe"].contains(request.audio_ref)) {
        throw InputError("asr mock: no transcription scripted for '" + request.audio_ref + "'");
    }
    const auto& per_run = script_["transcribe"][request.audio_ref];
    const std::string run_key = std::to_string(request.run_index);
    if (!per_run.contains(run_key)) {
        throw InputError("asr mock: no run " + run_key + " scripted for '" + request.audio_ref + "'");
    }
    const auto& entry = per_run[run_key];
    const json* body = &entry;
    if (entry.is_object() && (entry.contains("with_prompt") || entry.contains("without_prompt"))) {
        const char* variant = request.prompt.empty() ? "without_prompt" : "with_prompt";
        if (!entry.contains(variant)) {
            throw InputError("asr mock: variant '" + std::string(variant) + "' missing for '" +
                             request.audio_ref + "' run " + run_key);
        }
        body = &entry[variant];
    }
    return parse_transcribe_response(*body, request.run_index);
}

std::vector<MockAsrBackend::Call> MockAsrBackend::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::size_t MockAsrBackend::transcribe_calls() const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& c : calls_) {
        if (c.method == "transcribe") ++n;
    }
    return n;
}

std::size_t MockAsrBackend::detect_calls() const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& c : calls_) {
        if (c.method == "detect_language") ++n;
    }
    return n;
}

}  // namespace lyrictk
