#include "lyrictk/align.hpp"

#include <algorithm>

#include "lyrictk/errors.hpp"
#include "lyrictk/textnorm.hpp"
#include "lyrictk/utf8.hpp"

namespace lyrictk {

std::size_t levenshtein(std::string_view a, std::string_view b) {
    const std::u32string ua = utf8::decode(a);
    const std::u32string ub = utf8::decode(b);
    const std::size_t m = ua.size();
    const std::size_t n = ub.size();
    if (m == 0) return n;
    if (n == 0) return m;
    std::vector<std::size_t> prev(n + 1);
    std::vector<std::size_t> cur(n + 1);
    for (std::size_t j = 0; j <= n; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= m; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t sub = prev[j - 1] + (ua[i - 1] == ub[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

double normalized_distance(std::string_view a, std::string_view b) {
    const std::size_t la = utf8::count_codepoints(a);
    const std::size_t lb = utf8::count_codepoints(b);
    const std::size_t longer = std::max(la, lb);
    if (longer == 0) return 0.0;
    return static_cast<double>(levenshtein(a, b)) / static_cast<double>(longer);
}

std::string normalize_for_alignment(std::string_view text) {
    NormalizationRules rules;
    rules.language = "other";
    rules.strip_punctuation = true;
    rules.number_conversion = false;
    return normalize_text(text, rules);
}

AlignmentResult align_lines(const std::vector<TranscriptSegment>& segments,
                            const std::vector<std::string>& lines,
                            double threshold) {
    const std::size_t n = lines.size();
    const std::size_t m = segments.size();
    AlignmentResult result;
    if (n == 0) return result;

    std::vector<std::string> norm_lines(n);
    for (std::size_t i = 0; i < n; ++i) norm_lines[i] = normalize_for_alignment(lines[i]);
    std::vector<std::string> norm_segs(m);
    for (std::size_t j = 0; j < m; ++j) norm_segs[j] = normalize_for_alignment(segments[j].text);

    std::vector<std::vector<double>> dist(n, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            dist[i][j] = normalized_distance(norm_lines[i], norm_segs[j]);
        }
    }

    struct Cell {
        int matches = 0;
        double total = 0.0;
        int move = 0;  // 1 skip line, 2 skip segment, 3 match
    };
    const auto better = [](int ma, double ta, int mb, double tb) {
        if (ma != mb) return ma > mb;
        return ta < tb;
    };

    std::vector<std::vector<Cell>> dp(n + 1, std::vector<Cell>(m + 1));
    for (std::size_t i = 1; i <= n; ++i) dp[i][0] = {0, 0.0, 1};
    for (std::size_t j = 1; j <= m; ++j) dp[0][j] = {0, 0.0, 2};
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            // Candidates in tie-break priority: match, skip segment, skip line.
            Cell best;
            bool have = false;
            const auto consider = [&](int matches, double total, int move) {
                if (!have || better(matches, total, best.matches, best.total)) {
                    best = {matches, total, move};
                    have = true;
                }
            };
            const double d = dist[i - 1][j - 1];
            if (d <= threshold) {
                consider(dp[i - 1][j - 1].matches + 1, dp[i - 1][j - 1].total + d, 3);
            }
            consider(dp[i][j - 1].matches, dp[i][j - 1].total, 2);
            consider(dp[i - 1][j].matches, dp[i - 1][j].total, 1);
            dp[i][j] = best;
        }
    }

    std::vector<bool> matched(n, false);
    std::vector<std::size_t> match_segment(n, 0);
    std::size_t i = n;
    std::size_t j = m;
    while (i > 0 || j > 0) {
        const Cell& c = dp[i][j];
        if (i > 0 && j > 0 && c.move == 3) {
            matched[i - 1] = true;
            match_segment[i - 1] = j - 1;
            --i;
            --j;
        } else if (j > 0 && (c.move == 2 || i == 0)) {
            --j;
        } else {
            --i;
        }
    }

    for (std::size_t k = 0; k < n; ++k) {
        if (!matched[k]) {
            result.dropped.push_back(lines[k]);
            continue;
        }
        const std::size_t s = match_segment[k];
        AlignedLine out;
        out.text = lines[k];
        out.start_s = segments[s].start_s;
        out.end_s = segments[s].end_s;
        out.source_segment_index = s;
        out.distance = dist[k][s];
        result.aligned.push_back(std::move(out));
    }
    return result;
}

bool char_rate_ok(const AlignedLine& line, double max_rate) {
    const double duration = line.end_s - line.start_s;
    if (duration <= 0.0) throw ContractError("char_rate_ok: non-positive duration");
    const std::size_t chars = utf8::count_codepoints(normalize_for_alignment(line.text));
    const double rate = static_cast<double>(chars) / duration;
    return rate <= max_rate;
}

}  // namespace lyrictk
