#include "lyrictk/llm_ensemble.hpp"

#include <random>

#include <json.hpp>

#include "lyrictk/metrics.hpp"

namespace lyrictk {

using json = nlohmann::ordered_json;

PredictionSet make_prediction_set(const std::vector<std::vector<std::string>>& candidate_lines,
                                  std::string language) {
    PredictionSet set;
    set.language = std::move(language);
    set.candidates.reserve(candidate_lines.size());
    for (std::size_t i = 0; i < candidate_lines.size(); ++i) {
        set.candidates.emplace_back("prediction_" + std::to_string(i + 1), candidate_lines[i]);
    }
    return set;
}

std::string language_display_name(std::string_view code) {
    if (code == "en") return "English";
    if (code == "fr") return "French";
    if (code == "es") return "Spanish";
    if (code == "it") return "Italian";
    if (code == "ru") return "Russian";
    if (code == "de") return "German";
    return std::string(code);
}

std::string build_instruction_prompt(const PromptMode& mode) {
    const bool dataset = mode.kind == PromptMode::Kind::dataset;
    std::string p;
    p += "Task:\n";
    p += "As a GPT-4 based lyrics transcription post-processor, your task is to "
         "analyze multiple ASR model-generated versions of a song's lyrics and "
         "determine the most accurate version closest to the true lyrics.";
    if (dataset) {
        p += " Also filter out invalid lyrics when all predictions are nonsense.";
    }
    p += "\n\nInput:\nThe input is in JSON format:\n\n";
    p += "{\"prediction_1\": \"line1;line2;...\", ...}\n\n";
    p += "Output:\nYour output must be strictly in readable JSON format without "
         "any extra text:\n\n";
    p += "{\n\"reasons\": \"reason1;reason2;...\",\n\"closest_prediction\": "
         "<key_of_prediction>\n\"output\": \"line1;line2...\"\n}\n\n";
    p += "Requirements:\n";
    p += "For the \"reasons\" field, you have to provide a reason for the choice "
         "of the \"closest_prediction\" field.\n";
    p += "For the \"closest_prediction\" field, choose the prediction key that is "
         "closest to the true lyrics.";
    if (dataset) {
        p += " Only when all predictions greatly differ from each other or are "
             "completely nonsense or meaningless, which means that none of the "
             "predictions is valid, fill in \"None\" in this field.";
    }
    p += "\nFor the \"output\" field, you need to output the final lyrics of "
         "closest_prediction.";
    if (dataset) {
        p += " If the \"closest_prediction\" field is \"None\", you should also "
             "output \"None\" in this field. The language of the input lyrics is " +
             language_display_name(mode.language) + ".";
    }
    p += "\n";
    return p;
}

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
    std::string joined;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) joined += ';';
        std::string line = lines[i];
        for (char& c : line) {
            if (c == ';') c = ',';
        }
        joined += line;
    }
    return joined;
}

std::vector<std::string> split_lines(const std::string& joined) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = joined.find(';', start);
        if (pos == std::string::npos) {
            lines.push_back(joined.substr(start));
            return lines;
        }
        lines.push_back(joined.substr(start, pos - start));
        start = pos + 1;
    }
}

// Scans raw for the first substring that parses as a JSON object, tolerating
// prose and code fences around it. Balanced-brace scan is string-aware.
json extract_first_json_object(const std::string& raw) {
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] != '{') continue;
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t j = i; j < raw.size(); ++j) {
            const char c = raw[j];
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
                continue;
            }
            if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) {
                    try {
                        json obj = json::parse(raw.substr(i, j - i + 1));
                        if (obj.is_object()) return obj;
                    } catch (const json::parse_error&) {
                    }
                    break;  // try the next '{'
                }
            }
        }
    }
    throw ParseError("no JSON object found in reply");
}

std::string require_string_field(const json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw SchemaError(std::string("reply missing string field '") + key + "'");
    }
    return obj[key].get<std::string>();
}

}  // namespace

std::string serialize_predictions(const PredictionSet& set) {
    if (set.candidates.empty()) throw ContractError("serialize_predictions: empty set");
    json obj = json::object();
    for (const auto& [key, lines] : set.candidates) {
        if (lines.empty()) {
            throw ContractError("serialize_predictions: candidate '" + key + "' has no lines");
        }
        obj[key] = join_lines(lines);
    }
    return obj.dump();
}

std::string serialize_response(const EnsembleResponse& response) {
    json obj = json::object();
    obj["reasons"] = response.reasons;
    obj["closest_prediction"] = response.closest_prediction;
    obj["output"] = response.is_none() ? std::string(kNoneMarker) : join_lines(response.output);
    return obj.dump();
}

EnsembleResponse parse_response(const std::string& raw,
                                const std::vector<std::string>& valid_keys) {
    const json obj = extract_first_json_object(raw);
    EnsembleResponse out;
    out.reasons = require_string_field(obj, "reasons");
    out.closest_prediction = require_string_field(obj, "closest_prediction");
    const std::string output = require_string_field(obj, "output");

    if (out.closest_prediction == kNoneMarker) {
        if (output != kNoneMarker) {
            throw SchemaError("closest_prediction is None but output is not");
        }
        return out;
    }
    bool known = false;
    for (const auto& k : valid_keys) {
        if (k == out.closest_prediction) {
            known = true;
            break;
        }
    }
    if (!known) {
        throw SchemaError("closest_prediction '" + out.closest_prediction +
                          "' is not a prediction key");
    }
    if (output == kNoneMarker) {
        throw SchemaError("output is None but closest_prediction is not");
    }
    if (output.empty()) throw SchemaError("output is empty");
    out.output = split_lines(output);
    return out;
}

EnsembleOutcome ensemble(const PredictionSet& set, const PromptMode& mode,
                         ChatBackend& client, int max_retries) {
    if (set.candidates.size() < 2) {
        throw ContractError("ensemble: need at least two candidates");
    }
    std::vector<std::string> keys;
    keys.reserve(set.candidates.size());
    for (const auto& [key, _] : set.candidates) keys.push_back(key);

    const std::vector<ChatMessage> messages = {
        {"system", build_instruction_prompt(mode)},
        {"user", serialize_predictions(set)},
    };

    EnsembleOutcome outcome;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
        outcome.attempts = attempt + 1;
        const std::string raw = client.chat(messages, 0.0);
        EnsembleResponse response;
        try {
            response = parse_response(raw, keys);
        } catch (const ParseError&) {
            continue;
        } catch (const SchemaError&) {
            continue;
        }
        outcome.reasons = response.reasons;
        if (response.is_none()) {
            outcome.status = EnsembleOutcome::Status::invalid;
            return outcome;
        }
        outcome.status = EnsembleOutcome::Status::selected;
        outcome.chosen_key = response.closest_prediction;
        outcome.lines = response.output;
        for (const auto& [key, lines] : set.candidates) {
            if (key == outcome.chosen_key) {
                outcome.corrected = lines != outcome.lines;
                break;
            }
        }
        return outcome;
    }

    // Retries exhausted. Benchmarks must still produce a hypothesis; dataset
    // construction would rather drop the track than keep unreviewed text.
    if (mode.kind == PromptMode::Kind::benchmark) {
        outcome.status = EnsembleOutcome::Status::fallback_used;
        outcome.chosen_key = set.candidates.front().first;
        outcome.lines = set.candidates.front().second;
    } else {
        outcome.status = EnsembleOutcome::Status::invalid;
    }
    return outcome;
}

void MinWerChatClient::set_reference(const std::vector<std::string>& lines) {
    std::lock_guard lock(mutex_);
    reference_ = lines;
}

std::string MinWerChatClient::chat(const std::vector<ChatMessage>& messages, double) {
    std::vector<std::string> reference;
    {
        std::lock_guard lock(mutex_);
        ++calls_;
        reference = reference_;
    }
    const ChatMessage* user = nullptr;
    for (const auto& m : messages) {
        if (m.role == "user") user = &m;
    }
    if (!user) throw InputError("min-wer client: no user message");

    json obj;
    try {
        obj = json::parse(user->content);
    } catch (const json::parse_error&) {
        throw InputError("min-wer client: user message is not JSON");
    }

    NormalizationRules rules;
    rules.language = "other";
    rules.number_conversion = false;
    // Joined with spaces, not the wire separator: punctuation stripping
    // would otherwise weld the words around each line break together.
    std::string flat_ref;
    for (const auto& line : reference) {
        if (!flat_ref.empty()) flat_ref += ' ';
        flat_ref += line;
    }
    const auto ref_tokens = tokenize(normalize_text(flat_ref, rules));

    std::string best_key;
    std::string best_joined;
    double best_wer = 0.0;
    bool have = false;
    for (const auto& [key, value] : obj.items()) {
        if (!value.is_string()) continue;
        const std::string joined = value.get<std::string>();
        double wer = 0.0;
        if (!ref_tokens.empty()) {
            std::string flat = joined;
            for (char& c : flat) {
                if (c == ';') c = ' ';
            }
            wer = word_error_rate(ref_tokens, tokenize(normalize_text(flat, rules))).wer;
        }
        if (!have || wer < best_wer) {
            have = true;
            best_wer = wer;
            best_key = key;
            best_joined = joined;
        }
    }
    if (!have) throw InputError("min-wer client: no candidates in user message");

    json reply = json::object();
    reply["reasons"] = "smallest word error rate against the reference";
    reply["closest_prediction"] = best_key;
    reply["output"] = best_joined;
    return reply.dump();
}

std::size_t MinWerChatClient::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

GtExperimentResult gt_selection_experiment(const std::vector<GtExperimentItem>& corpus,
                                           const PromptMode& mode, ChatBackend& client,
                                           std::uint64_t seed) {
    GtExperimentResult result;
    result.items = corpus.size();
    std::mt19937_64 rng(seed);
    auto* reference_aware = dynamic_cast<ReferenceAwareChatBackend*>(&client);

    for (const auto& item : corpus) {
        const std::size_t n = item.set.candidates.size();
        std::uniform_int_distribution<std::size_t> position(0, n);
        const std::size_t gt_pos = position(rng);

        std::vector<std::vector<std::string>> lines;
        lines.reserve(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == gt_pos) {
                lines.push_back(item.ground_truth);
            }
            if (i < n) {
                lines.push_back(item.set.candidates[i].second);
            }
        }
        PredictionSet augmented = make_prediction_set(lines, item.set.language);
        const std::string gt_key = "prediction_" + std::to_string(gt_pos + 1);

        PromptMode item_mode = mode;
        if (!item.set.language.empty()) item_mode.language = item.set.language;
        if (reference_aware) reference_aware->set_reference(item.ground_truth);

        try {
            const EnsembleOutcome outcome = ensemble(augmented, item_mode, client);
            if (outcome.status == EnsembleOutcome::Status::selected &&
                outcome.chosen_key == gt_key) {
                ++result.selected_ground_truth;
            }
        } catch (const TransportError&) {
            result.excluded.push_back(item.id);
        }
    }

    const std::size_t scored = result.items - result.excluded.size();
    result.selection_rate =
        scored ? static_cast<double>(result.selected_ground_truth) / static_cast<double>(scored)
               : 0.0;
    return result;
}

}  // namespace lyrictk
