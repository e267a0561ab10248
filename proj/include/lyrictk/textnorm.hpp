#pragma once

#include <string>
#include <string_view>

namespace lyrictk {

// Per-language switches applied identically to references and hypotheses
// before any distance or error-rate computation.
struct NormalizationRules {
    std::string language = "en";    // ISO 639-1 code; anything else passes digits through
    bool strip_punctuation = true;
    bool number_conversion = true;  // effective only when language == "en"
};

// The languages with dedicated handling. Everything else normalizes with
// the generic rules (no number spelling).
bool is_supported_language(std::string_view language);
NormalizationRules default_rules_for(std::string_view language);

// Removes every codepoint outside {letters, digits, ASCII punctuation,
// apostrophes, whitespace, combining marks attached to letters}; collapses
// whitespace runs to a single space and trims the ends. Emoji, pictographs,
// zero-width joiners and similar symbols are dropped. Diacritics survive.
std::string strip_special_unicode(std::string_view text);

// Spells an ASCII digit run as hyphenless English cardinal words
// ("21" -> "twenty one"). Supported range 0..999999; longer runs pass
// through unchanged, as does every token when language != "en".
// Throws ContractError if the token is empty or contains a non-digit.
std::string number_to_words(std::string_view token, std::string_view language);

// Fixed stage order: strip_special_unicode, case folding, digit-run
// spelling, punctuation stripping (apostrophes between word characters
// survive), whitespace collapse. Idempotent.
std::string normalize_text(std::string_view text, const NormalizationRules& rules);

}  // namespace lyrictk
