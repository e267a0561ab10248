#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lyrictk/asr_backend.hpp"

namespace lyrictk {

struct AlignedLine {
    std::string text;  // the final lyric line, verbatim
    double start_s = 0.0;
    double end_s = 0.0;
    std::size_t source_segment_index = 0;
    double distance = 0.0;  // normalized edit distance line vs. segment
};

// Codepoint-level edit distance, so "déjà" counts four characters no
// matter how the bytes fall.
std::size_t levenshtein(std::string_view a, std::string_view b);

// levenshtein(a, b) / max(|a|, |b|) over codepoints; 0.0 when both empty.
double normalized_distance(std::string_view a, std::string_view b);

// The canonical form both alignment and character-rate checks score
// against: language-independent normalization, no digit spelling.
std::string normalize_for_alignment(std::string_view text);

struct AlignmentResult {
    std::vector<AlignedLine> aligned;
    std::vector<std::string> dropped;  // lines left unmatched, in input order
};

// Order-preserving matching of final lines onto raw segments. A pair is
// admissible when its normalized distance is at or under the threshold;
// among monotonic matchings the one matching the most lines wins, ties
// broken by smallest total distance. Unmatched segments are free to skip,
// unmatched lines are reported as dropped. Matched lines inherit the
// segment's timestamps.
AlignmentResult align_lines(const std::vector<TranscriptSegment>& segments,
                            const std::vector<std::string>& lines,
                            double threshold = 0.2);

// Characters per second of the normalized line text, spaces included,
// against the segment-inherited span. At the limit passes; above fails.
// Throws ContractError on a non-positive duration.
bool char_rate_ok(const AlignedLine& line, double max_rate = 37.5);

}  // namespace lyrictk
