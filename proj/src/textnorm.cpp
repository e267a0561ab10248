#include "lyrictk/textnorm.hpp"

#include <array>
#include <cstdint>
#include <string>

#include "lyrictk/errors.hpp"
#include "lyrictk/utf8.hpp"

namespace lyrictk {

namespace {

constexpr std::array<std::string_view, 6> kSupported = {"en", "fr", "es", "it", "ru", "de"};

bool is_word_cp(char32_t c) {
    return utf8::is_letter(c) || utf8::is_ascii_digit(c) || utf8::is_combining_mark(c);
}

std::string spell_below_thousand(unsigned long n) {
    static const char* ones[] = {
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight",
        "nine", "ten", "eleven", "twelve", "thirteen", "fourteen", "fifteen",
        "sixteen", "seventeen", "eighteen", "nineteen"};
    static const char* tens[] = {"twenty", "thirty", "forty", "fifty",
                                 "sixty", "seventy", "eighty", "ninety"};
    std::string out;
    if (n >= 100) {
        out += ones[n / 100];
        out += " hundred";
        n %= 100;
        if (n) out += ' ';
    }
    if (n >= 20) {
        out += tens[n / 10 - 2];
        n %= 10;
        if (n) {
            out += ' ';
            out += ones[n];
        }
    } else if (n > 0 || out.empty()) {
        out += ones[n];
    }
    return out;
}

std::string spell_english(unsigned long value) {
    if (value == 0) return "zero";
    std::string out;
    if (value >= 1000) {
        out += spell_below_thousand(value / 1000);
        out += " thousand";
        value %= 1000;
        if (value) out += ' ';
    }
    if (value) out += spell_below_thousand(value);
    return out;
}

std::u32string convert_digit_runs(const std::u32string& text) {
    std::u32string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (!utf8::is_ascii_digit(text[i])) {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        std::size_t j = i;
        std::string run;
        while (j < text.size() && utf8::is_ascii_digit(text[j])) {
            run.push_back(static_cast<char>(text[j]));
            ++j;
        }
        const std::string spelled = number_to_words(run, "en");
        for (char32_t c : utf8::decode(spelled)) out.push_back(c);
        i = j;
    }
    return out;
}

std::u32string collapse_whitespace(const std::u32string& text) {
    std::u32string out;
    out.reserve(text.size());
    bool pending = false;
    for (char32_t c : text) {
        if (c == U' ') {
            if (!out.empty()) pending = true;
            continue;
        }
        if (pending) {
            out.push_back(U' ');
            pending = false;
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace

bool is_supported_language(std::string_view language) {
    for (auto s : kSupported) {
        if (s == language) return true;
    }
    return false;
}

NormalizationRules default_rules_for(std::string_view language) {
    NormalizationRules rules;
    rules.language = is_supported_language(language) ? std::string(language) : "other";
    rules.strip_punctuation = true;
    rules.number_conversion = rules.language == "en";
    return rules;
}

std::string strip_special_unicode(std::string_view text) {
    const std::u32string in = utf8::decode(text);
    std::u32string out;
    out.reserve(in.size());
    bool pending_space = false;
    for (char32_t c : in) {
        if (utf8::is_whitespace(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (utf8::is_letter(c) || utf8::is_ascii_digit(c) ||
            utf8::is_ascii_punct(c) || utf8::is_apostrophe(c)) {
            if (pending_space) {
                out.push_back(U' ');
                pending_space = false;
            }
            out.push_back(c);
            continue;
        }
        // A combining mark survives only while glued to a kept letter.
        if (utf8::is_combining_mark(c) && !pending_space && !out.empty()) {
            const char32_t prev = out.back();
            if (utf8::is_letter(prev) || utf8::is_combining_mark(prev)) {
                out.push_back(c);
            }
        }
    }
    return utf8::encode(out);
}

std::string number_to_words(std::string_view token, std::string_view language) {
    if (token.empty()) throw ContractError("number_to_words: empty token");
    for (char ch : token) {
        if (ch < '0' || ch > '9') {
            throw ContractError("number_to_words: non-digit in token '" + std::string(token) + "'");
        }
    }
    if (language != "en") return std::string(token);
    if (token.size() > 18) return std::string(token);
    const unsigned long long value = std::stoull(std::string(token));
    if (value > 999999) return std::string(token);
    return spell_english(static_cast<unsigned long>(value));
}

std::string normalize_text(std::string_view text, const NormalizationRules& rules) {
    std::u32string s = utf8::decode(strip_special_unicode(text));
    s = utf8::fold(s);
    if (rules.number_conversion && rules.language == "en") {
        s = convert_digit_runs(s);
    }
    if (rules.strip_punctuation) {
        std::u32string kept;
        kept.reserve(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            const char32_t c = s[i];
            if (utf8::is_apostrophe(c)) {
                const bool prev_word = i > 0 && is_word_cp(s[i - 1]);
                const bool next_word = i + 1 < s.size() && is_word_cp(s[i + 1]);
                if (prev_word && next_word) kept.push_back(c);
                continue;
            }
            if (utf8::is_ascii_punct(c)) continue;
            kept.push_back(c);
        }
        s = std::move(kept);
    }
    return utf8::encode(collapse_whitespace(s));
}

}  // namespace lyrictk
