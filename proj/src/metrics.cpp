#include "lyrictk/metrics.hpp"

#include <tuple>

#include "lyrictk/errors.hpp"

namespace lyrictk {

namespace {

struct Cost {
    std::size_t total = 0;
    std::size_t subs = 0;
    std::size_t ins = 0;

    Cost plus(std::size_t dt, std::size_t ds, std::size_t di) const {
        return {total + dt, subs + ds, ins + di};
    }
    bool operator<(const Cost& other) const {
        return std::tie(total, subs, ins) < std::tie(other.total, other.subs, other.ins);
    }
};

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != '\n' && text[j] != '\r') ++j;
        if (j > i) tokens.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return tokens;
}

WerBreakdown word_error_rate(const std::vector<std::string>& reference,
                             const std::vector<std::string>& hypothesis) {
    if (reference.empty()) throw ContractError("word_error_rate: empty reference");
    const std::size_t m = reference.size();
    const std::size_t n = hypothesis.size();

    // dp[i][j]: lexicographically minimal (total, substitutions, insertions)
    // over alignments of reference[:i] with hypothesis[:j]. The tuple order
    // is what pins down the reported breakdown among equal-cost alignments.
    std::vector<std::vector<Cost>> dp(m + 1, std::vector<Cost>(n + 1));
    for (std::size_t j = 1; j <= n; ++j) dp[0][j] = Cost{j, 0, j};
    for (std::size_t i = 1; i <= m; ++i) dp[i][0] = Cost{i, 0, 0};
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            const bool match = reference[i - 1] == hypothesis[j - 1];
            Cost best = dp[i - 1][j - 1].plus(match ? 0 : 1, match ? 0 : 1, 0);
            const Cost del = dp[i - 1][j].plus(1, 0, 0);
            if (del < best) best = del;
            const Cost ins = dp[i][j - 1].plus(1, 0, 1);
            if (ins < best) best = ins;
            dp[i][j] = best;
        }
    }

    const Cost final = dp[m][n];
    WerBreakdown out;
    out.reference_words = m;
    out.substitutions = final.subs;
    out.insertions = final.ins;
    out.deletions = final.total - final.subs - final.ins;
    out.wer = static_cast<double>(final.total) / static_cast<double>(m);
    return out;
}

CorpusWerReport corpus_wer(const std::vector<CorpusItem>& items, const RulesProvider& rules_for) {
    CorpusWerReport report;
    std::size_t total_edits = 0;
    std::size_t total_ref_words = 0;
    double wer_sum = 0.0;
    std::map<std::string, std::pair<double, std::size_t>> lang_acc;

    for (const auto& item : items) {
        const NormalizationRules rules =
            rules_for ? rules_for(item.language) : default_rules_for(item.language);
        const auto ref_tokens = tokenize(normalize_text(item.reference, rules));
        if (ref_tokens.empty()) {
            report.excluded.push_back(item.id);
            continue;
        }
        const auto hyp_tokens = tokenize(normalize_text(item.hypothesis, rules));
        const WerBreakdown b = word_error_rate(ref_tokens, hyp_tokens);
        report.per_item.emplace_back(item.id, b);
        wer_sum += b.wer;
        total_edits += b.edits();
        total_ref_words += b.reference_words;
        auto& acc = lang_acc[item.language];
        acc.first += b.wer;
        acc.second += 1;
    }

    const std::size_t scored = report.per_item.size();
    report.mean_wer = scored ? wer_sum / static_cast<double>(scored) : 0.0;
    report.pooled_wer = total_ref_words
                            ? static_cast<double>(total_edits) / static_cast<double>(total_ref_words)
                            : 0.0;
    for (const auto& [lang, acc] : lang_acc) {
        report.per_language[lang] = acc.first / static_cast<double>(acc.second);
    }
    return report;
}

}  // namespace lyrictk
