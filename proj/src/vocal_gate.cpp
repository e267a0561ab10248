#include "lyrictk/vocal_gate.hpp"

#include <cmath>
#include <fstream>

#include <httplib.h>

namespace lyrictk {

using json = nlohmann::json;

const std::set<std::string>& default_vocal_tags() {
    // The singing/speech/voice family of the AudioSet ontology.
    static const std::set<std::string> tags = {
        "Speech", "Male speech, man speaking", "Female speech, woman speaking",
        "Child speech, kid speaking", "Conversation", "Narration, monologue",
        "Singing", "Choir", "Yodeling", "Chant", "Mantra", "Male singing",
        "Female singing", "Child singing", "Synthetic singing", "Rapping",
        "Humming", "A capella", "Vocal music", "Human voice",
    };
    return tags;
}

GateConfig::GateConfig() : vocal_tags(default_vocal_tags()) {}

bool is_vocal(const TagScores& scores, const GateConfig& config) {
    double best = 0.0;
    for (const auto& tag : config.vocal_tags) {
        const auto it = scores.scores.find(tag);
        if (it != scores.scores.end() && it->second > best) best = it->second;
    }
    return best >= config.threshold;
}

HttpTaggerBackend::HttpTaggerBackend(std::string base_url, RetryPolicy retry)
    : base_url_(std::move(base_url)), retry_(retry) {}

TagScores HttpTaggerBackend::tag(const std::string& audio_ref) {
    return with_retries(retry_, [&]() -> TagScores {
        httplib::Client cli(base_url_);
        cli.set_connection_timeout(10, 0);
        cli.set_read_timeout(120, 0);
        auto res = cli.Post("/tag", json{{"audio", audio_ref}}.dump(), "application/json");
        if (!res) {
            throw TransportError("POST /tag: " + httplib::to_string(res.error()));
        }
        if (res->status >= 500) {
            throw TransportError("POST /tag: HTTP " + std::to_string(res->status));
        }
        if (res->status != 200) {
            throw InputError("POST /tag: HTTP " + std::to_string(res->status));
        }
        json reply;
        try {
            reply = json::parse(res->body);
        } catch (const json::parse_error&) {
            throw SchemaError("POST /tag: response is not JSON");
        }
        if (!reply.contains("scores") || !reply["scores"].is_object()) {
            throw SchemaError("POST /tag: missing 'scores'");
        }
        TagScores out;
        for (const auto& [tag, score] : reply["scores"].items()) {
            if (!score.is_number()) throw SchemaError("POST /tag: non-numeric score");
            const double v = score.get<double>();
            if (!std::isfinite(v)) throw SchemaError("POST /tag: non-finite score");
            out.scores[tag] = v;
        }
        return out;
    });
}

MockTaggerBackend::MockTaggerBackend(const std::string& script_path) {
    std::ifstream in(script_path);
    if (!in) throw ConfigError("tagger mock: cannot open " + script_path);
    try {
        script_ = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("tagger mock: invalid JSON in " + script_path + ": " + e.what());
    }
}

TagScores MockTaggerBackend::tag(const std::string& audio_ref) {
    {
        std::lock_guard lock(mutex_);
        calls_.push_back(audio_ref);
    }
    if (!script_.contains("tag") || !script_["tag"].contains(audio_ref)) {
        throw InputError("tagger mock: no entry for '" + audio_ref + "'");
    }
    const auto& entry = script_["tag"][audio_ref];
    if (!entry.contains("scores") || !entry["scores"].is_object()) {
        throw SchemaError("tagger mock: entry for '" + audio_ref + "' lacks 'scores'");
    }
    TagScores out;
    for (const auto& [tag, score] : entry["scores"].items()) {
        out.scores[tag] = score.get<double>();
    }
    return out;
}

std::size_t MockTaggerBackend::tag_calls() const {
    std::lock_guard lock(mutex_);
    return calls_.size();
}

}  // namespace lyrictk
