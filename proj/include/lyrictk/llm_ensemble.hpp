#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lyrictk/chat_backend.hpp"

namespace lyrictk {

inline constexpr const char* kNoneMarker = "None";

struct PromptMode {
    enum class Kind { benchmark, dataset };
    Kind kind = Kind::benchmark;
    std::string language = "en";  // only consulted in dataset mode
};

// Candidate transcriptions keyed "prediction_1".."prediction_n" in run order.
struct PredictionSet {
    std::vector<std::pair<std::string, std::vector<std::string>>> candidates;
    std::string language = "en";
};

PredictionSet make_prediction_set(const std::vector<std::vector<std::string>>& candidate_lines,
                                  std::string language);

std::string language_display_name(std::string_view code);

// The selection instruction sent as the system message. Dataset mode adds
// the validity-filtering clauses and names the expected lyrics language;
// benchmark mode asks only for the closest candidate.
std::string build_instruction_prompt(const PromptMode& mode);

// One JSON object, keys in candidate order, each value the lines joined
// with ';' (any ';' inside a line becomes ',' first, keeping the separator
// unambiguous). Throws ContractError on an empty set or empty candidate.
std::string serialize_predictions(const PredictionSet& set);

struct EnsembleResponse {
    std::string reasons;
    std::string closest_prediction;   // a prediction key, or the None marker
    std::vector<std::string> output;  // empty iff closest_prediction is None

    bool is_none() const { return closest_prediction == kNoneMarker; }
};

std::string serialize_response(const EnsembleResponse& response);

// Pulls the first parseable JSON object out of the raw reply (models wrap
// replies in prose and code fences), then checks the three-field contract:
// ParseError when no object parses, SchemaError when fields are missing,
// the key is unknown, or the None marker is only half-applied.
EnsembleResponse parse_response(const std::string& raw,
                                const std::vector<std::string>& valid_keys);

struct EnsembleOutcome {
    enum class Status { selected, fallback_used, invalid };
    Status status = Status::invalid;
    std::vector<std::string> lines;
    std::string chosen_key;
    std::string reasons;
    int attempts = 0;
    bool corrected = false;  // output differs from the chosen candidate
};

// Sends the instruction plus serialized candidates at temperature 0 and
// retries malformed replies up to max_retries times. After exhaustion,
// benchmark mode falls back to prediction_1; dataset mode declares the
// track invalid. A None reply is invalid immediately, with no retry.
EnsembleOutcome ensemble(const PredictionSet& set, const PromptMode& mode,
                         ChatBackend& client, int max_retries = 3);

// Oracle client: answers with the candidate whose word error rate against
// the configured reference is smallest. Exists for selection-quality
// experiments and ablation fixtures, not for production use.
class MinWerChatClient : public ReferenceAwareChatBackend {
public:
    void set_reference(const std::vector<std::string>& lines) override;
    std::string chat(const std::vector<ChatMessage>& messages, double temperature) override;
    std::size_t call_count() const;

private:
    mutable std::mutex mutex_;
    std::vector<std::string> reference_;
    std::size_t calls_ = 0;
};

struct GtExperimentItem {
    std::string id;
    PredictionSet set;
    std::vector<std::string> ground_truth;
};

struct GtExperimentResult {
    std::size_t items = 0;
    std::size_t selected_ground_truth = 0;
    std::vector<std::string> excluded;  // transport failures
    double selection_rate = 0.0;
};

// Plants the ground truth at a seeded-uniform position among the candidates
// of each item and measures how often the ensemble picks exactly that key.
GtExperimentResult gt_selection_experiment(const std::vector<GtExperimentItem>& corpus,
                                           const PromptMode& mode, ChatBackend& client,
                                           std::uint64_t seed);

}  // namespace lyrictk
