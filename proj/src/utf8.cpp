#include "lyrictk/utf8.hpp"

#include <algorithm>
#include <array>

namespace lyrictk::utf8 {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

struct Range {
    char32_t lo;
    char32_t hi;
};

bool in_ranges(char32_t c, const Range* ranges, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (c >= ranges[i].lo && c <= ranges[i].hi) return true;
    }
    return false;
}

// Letter ranges for the scripts the pipeline is expected to meet: the six
// dataset languages plus common passthrough scripts. Symbols, emoji and
// pictographs deliberately fall outside every range.
constexpr Range kLetterRanges[] = {
    {0x0041, 0x005A}, {0x0061, 0x007A},
    {0x00AA, 0x00AA}, {0x00B5, 0x00B5}, {0x00BA, 0x00BA},
    {0x00C0, 0x00D6}, {0x00D8, 0x00F6}, {0x00F8, 0x02AF},
    {0x0370, 0x0373}, {0x0376, 0x0377}, {0x037B, 0x037D},
    {0x0386, 0x0386}, {0x0388, 0x038A}, {0x038C, 0x038C},
    {0x038E, 0x03A1}, {0x03A3, 0x03F5}, {0x03F7, 0x0481},
    {0x048A, 0x052F}, {0x0531, 0x0556}, {0x0561, 0x0587},
    {0x05D0, 0x05EA}, {0x0620, 0x064A}, {0x0660, 0x0669},
    {0x0670, 0x06D3}, {0x0900, 0x097F},
    {0x1E00, 0x1FFF}, {0x2C60, 0x2C7F}, {0xA720, 0xA7CA},
    {0x3041, 0x3096}, {0x309D, 0x309F}, {0x30A1, 0x30FA},
    {0x30FC, 0x30FF}, {0x3400, 0x4DBF}, {0x4E00, 0x9FFF},
    {0xAC00, 0xD7A3}, {0xF900, 0xFAFF},
};

constexpr Range kCombiningRanges[] = {
    {0x0300, 0x036F}, {0x0483, 0x0489}, {0x0591, 0x05BD},
    {0x1AB0, 0x1AFF}, {0x1DC0, 0x1DFF}, {0x20D0, 0x20FF},
    {0xFE20, 0xFE2F},
};

}  // namespace

std::u32string decode(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const unsigned char b0 = static_cast<unsigned char>(text[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        int len = 0;
        char32_t cp = 0;
        char32_t min_cp = 0;
        if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
            min_cp = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
            min_cp = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
            min_cp = 0x10000;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        if (i + len > n) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (int k = 1; k < len; ++k) {
            const unsigned char bk = static_cast<unsigned char>(text[i + k]);
            if ((bk & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (bk & 0x3F);
        }
        if (!ok || cp < min_cp || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode(std::u32string_view codepoints) {
    std::string out;
    out.reserve(codepoints.size());
    for (char32_t cp : codepoints) {
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = kReplacement;
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

std::size_t count_codepoints(std::string_view text) {
    return decode(text).size();
}

bool is_letter(char32_t c) {
    return in_ranges(c, kLetterRanges, std::size(kLetterRanges));
}

bool is_ascii_digit(char32_t c) {
    return c >= U'0' && c <= U'9';
}

bool is_ascii_punct(char32_t c) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
}

bool is_apostrophe(char32_t c) {
    return c == 0x27 || c == 0x2019;
}

bool is_whitespace(char32_t c) {
    switch (c) {
        case U'\t': case U'\n': case U'\v': case U'\f': case U'\r': case U' ':
        case 0x0085: case 0x00A0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return c >= 0x2000 && c <= 0x200A;
    }
}

bool is_combining_mark(char32_t c) {
    return in_ranges(c, kCombiningRanges, std::size(kCombiningRanges));
}

void fold_append(char32_t c, std::u32string& out) {
    // ASCII fast path.
    if (c < 0x80) {
        if (c >= U'A' && c <= U'Z') c += 0x20;
        out.push_back(c);
        return;
    }
    // Multi-codepoint folds first.
    if (c == 0x00DF || c == 0x1E9E) {  // sharp s
        out.append(U"ss");
        return;
    }
    if (c == 0x0130) {  // I with dot above
        out.push_back(U'i');
        out.push_back(0x0307);
        return;
    }
    if (c == 0x00B5) { out.push_back(0x03BC); return; }  // micro sign
    if (c == 0x017F) { out.push_back(U's'); return; }    // long s
    if (c == 0x0178) { out.push_back(0x00FF); return; }
    if (c == 0x03C2) { out.push_back(0x03C3); return; }  // final sigma

    char32_t f = c;
    if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) {
        f = c + 0x20;
    } else if (c >= 0x0100 && c <= 0x0137) {
        if ((c & 1) == 0) f = c + 1;
    } else if (c >= 0x0139 && c <= 0x0148) {
        if ((c & 1) == 1) f = c + 1;
    } else if (c >= 0x014A && c <= 0x0177) {
        if ((c & 1) == 0) f = c + 1;
    } else if (c >= 0x0179 && c <= 0x017E) {
        if ((c & 1) == 1) f = c + 1;
    } else if ((c >= 0x01CD && c <= 0x01DC)) {
        if ((c & 1) == 1) f = c + 1;
    } else if ((c >= 0x01DE && c <= 0x01EF) || (c >= 0x01F8 && c <= 0x021F) ||
               (c >= 0x0222 && c <= 0x0233) || (c >= 0x0246 && c <= 0x024F)) {
        if ((c & 1) == 0) f = c + 1;
    } else if (c == 0x01F4) {
        f = 0x01F5;
    } else if (c == 0x0386) {
        f = 0x03AC;
    } else if (c >= 0x0388 && c <= 0x038A) {
        f = c + 0x25;
    } else if (c == 0x038C) {
        f = 0x03CC;
    } else if (c == 0x038E || c == 0x038F) {
        f = c + 0x3F;
    } else if (c >= 0x0391 && c <= 0x03A1) {
        f = c + 0x20;
    } else if (c >= 0x03A3 && c <= 0x03AB) {
        f = c + 0x20;
    } else if (c >= 0x0400 && c <= 0x040F) {
        f = c + 0x50;
    } else if (c >= 0x0410 && c <= 0x042F) {
        f = c + 0x20;
    } else if ((c >= 0x0460 && c <= 0x0481) || (c >= 0x048A && c <= 0x04BF)) {
        if ((c & 1) == 0) f = c + 1;
    } else if (c == 0x04C0) {
        f = 0x04CF;
    } else if (c >= 0x04C1 && c <= 0x04CE) {
        if ((c & 1) == 1) f = c + 1;
    } else if (c >= 0x04D0 && c <= 0x052F) {
        if ((c & 1) == 0) f = c + 1;
    } else if ((c >= 0x1E00 && c <= 0x1E95) || (c >= 0x1EA0 && c <= 0x1EFF)) {
        if ((c & 1) == 0) f = c + 1;
    } else if (c >= 0xFF21 && c <= 0xFF3A) {
        f = c + 0x20;
    }
    out.push_back(f);
}

std::u32string fold(std::u32string_view text) {
    std::u32string out;
    out.reserve(text.size());
    for (char32_t c : text) fold_append(c, out);
    return out;
}

}  // namespace lyrictk::utf8
