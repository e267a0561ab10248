#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace lyrictk::utf8 {

// Total decoder: malformed byte sequences become U+FFFD and decoding resumes
// at the next byte, so no input can make downstream text handling throw.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view codepoints);
std::size_t count_codepoints(std::string_view text);

bool is_letter(char32_t c);
bool is_ascii_digit(char32_t c);
bool is_ascii_punct(char32_t c);
bool is_apostrophe(char32_t c);  // U+0027 and the typographic U+2019
bool is_whitespace(char32_t c);
bool is_combining_mark(char32_t c);

// Case folding for the scripts this toolkit targets (Latin plus its
// extension blocks, Greek, Cyrillic). Multi-codepoint folds expand, e.g.
// U+00DF -> "ss", so the result may be longer than the input. Codepoints
// without a mapping pass through unchanged; folding is idempotent.
void fold_append(char32_t c, std::u32string& out);
std::u32string fold(std::u32string_view text);

}  // namespace lyrictk::utf8
