#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "glyphdraw/error.hpp"

namespace glyphdraw::utf8 {

/// Decodes UTF-8 into Unicode scalar values. Rejects overlong forms,
/// surrogates and truncated sequences.
inline std::u32string decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        char32_t cp = 0;
        std::size_t len = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        } else {
            throw InputError("invalid UTF-8 lead byte at offset " + std::to_string(i));
        }
        if (i + len > s.size())
            throw InputError("truncated UTF-8 sequence at offset " + std::to_string(i));
        for (std::size_t k = 1; k < len; ++k) {
            const auto b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80)
                throw InputError("invalid UTF-8 continuation at offset " + std::to_string(i + k));
            cp = (cp << 6) | (b & 0x3F);
        }
        static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
        if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
            throw InputError("invalid UTF-8 scalar at offset " + std::to_string(i));
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline void append(std::string& out, char32_t cp) {
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

inline std::string encode(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps)
        append(out, cp);
    return out;
}

/// Unicode White_Space property.
constexpr bool is_whitespace(char32_t c) noexcept {
    return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
           (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
           c == 0x205F || c == 0x3000;
}

/// Scripts written without inter-word spaces: CJK ideographs, kana, hangul.
constexpr bool is_cjk(char32_t c) noexcept {
    return (c >= 0x3040 && c <= 0x30FF) ||    // hiragana, katakana
           (c >= 0x3400 && c <= 0x4DBF) ||    // ext A
           (c >= 0x4E00 && c <= 0x9FFF) ||    // unified ideographs
           (c >= 0xAC00 && c <= 0xD7AF) ||    // hangul syllables
           (c >= 0xF900 && c <= 0xFAFF) ||    // compatibility ideographs
           (c >= 0x20000 && c <= 0x3134F);    // ext B..G
}

/// Number of non-whitespace scalar values.
inline std::size_t count_chars(std::u32string_view s) noexcept {
    std::size_t n = 0;
    for (char32_t c : s)
        if (!is_whitespace(c))
            ++n;
    return n;
}

/// Word count with the CJK convention: every CJK scalar is one word, and
/// every maximal run of other non-whitespace scalars is one word.
inline std::size_t count_words(std::u32string_view s) noexcept {
    std::size_t n = 0;
    bool in_run = false;
    for (char32_t c : s) {
        if (is_whitespace(c)) {
            in_run = false;
        } else if (is_cjk(c)) {
            ++n;
            in_run = false;
        } else if (!in_run) {
            ++n;
            in_run = true;
        }
    }
    return n;
}

}  // namespace glyphdraw::utf8
