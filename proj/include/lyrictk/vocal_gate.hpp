#pragma once

#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyrictk/backend_util.hpp"

namespace lyrictk {

struct TagScores {
    std::map<std::string, double> scores;
};

// Which tagger labels count as "someone is singing or speaking", and how
// confident the tagger has to be on at least one of them.
struct GateConfig {
    std::set<std::string> vocal_tags;
    double threshold = 0.07;

    GateConfig();
};

const std::set<std::string>& default_vocal_tags();

// Max score over the configured vocal tags reaches the threshold. Missing
// tags count as zero, so an empty score map never passes.
bool is_vocal(const TagScores& scores, const GateConfig& config);

class TaggerBackend {
public:
    virtual ~TaggerBackend() = default;
    virtual TagScores tag(const std::string& audio_ref) = 0;
};

class HttpTaggerBackend : public TaggerBackend {
public:
    explicit HttpTaggerBackend(std::string base_url, RetryPolicy retry = {});
    TagScores tag(const std::string& audio_ref) override;

private:
    std::string base_url_;
    RetryPolicy retry_;
};

// Script file shape: {"tag": {"<audio_ref>": {"scores": {"Singing": 0.8}}}}.
// Unknown refs raise InputError.
class MockTaggerBackend : public TaggerBackend {
public:
    explicit MockTaggerBackend(const std::string& script_path);
    TagScores tag(const std::string& audio_ref) override;
    std::size_t tag_calls() const;

private:
    nlohmann::json script_;
    mutable std::mutex mutex_;
    std::vector<std::string> calls_;
};

}  // namespace lyrictk
