#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lyrictk/textnorm.hpp"

namespace lyrictk {

struct WerBreakdown {
    std::size_t insertions = 0;
    std::size_t substitutions = 0;
    std::size_t deletions = 0;
    std::size_t reference_words = 0;
    double wer = 0.0;

    std::size_t edits() const { return insertions + substitutions + deletions; }
};

// Whitespace split, nothing else. Hyphenated words stay one token; the
// normalizer is responsible for anything fancier.
std::vector<std::string> tokenize(std::string_view text);

// Minimum-edit-cost alignment of hypothesis against reference. Among
// minimum-cost alignments the counts are taken from the one with fewest
// substitutions, then fewest insertions, so breakdowns are reproducible.
// Throws ContractError when the reference is empty.
WerBreakdown word_error_rate(const std::vector<std::string>& reference,
                             const std::vector<std::string>& hypothesis);

struct CorpusItem {
    std::string id;
    std::string language;
    std::string reference;
    std::string hypothesis;
};

struct CorpusWerReport {
    std::vector<std::pair<std::string, WerBreakdown>> per_item;
    double mean_wer = 0.0;    // unweighted mean over scored items (headline number)
    double pooled_wer = 0.0;  // total edits over total reference words
    std::map<std::string, double> per_language;
    std::vector<std::string> excluded;  // items whose reference normalized to nothing
};

using RulesProvider = std::function<NormalizationRules(const std::string& language)>;

// Normalizes both sides per item language, scores each item, aggregates.
// Items with an empty normalized reference are excluded and listed rather
// than poisoning the averages.
CorpusWerReport corpus_wer(const std::vector<CorpusItem>& items,
                           const RulesProvider& rules_for = nullptr);

}  // namespace lyrictk
