#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace clir {

namespace detail {

    // Decodes one UTF-8 sequence starting at text[pos]. Advances pos past it.
    // Malformed or truncated sequences yield U+FFFD and consume one byte.
    inline char32_t decode_utf8(std::string_view text, std::size_t& pos)
    {
        constexpr char32_t replacement = 0xFFFD;
        auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
        unsigned char lead = byte(pos);
        if (lead < 0x80) {
            ++pos;
            return lead;
        }
        std::size_t len = 0;
        char32_t cp = 0;
        char32_t min = 0;
        if ((lead & 0xE0) == 0xC0) {
            len = 2;
            cp = lead & 0x1F;
            min = 0x80;
        } else if ((lead & 0xF0) == 0xE0) {
            len = 3;
            cp = lead & 0x0F;
            min = 0x800;
        } else if ((lead & 0xF8) == 0xF0) {
            len = 4;
            cp = lead & 0x07;
            min = 0x10000;
        } else {
            ++pos;
            return replacement;
        }
        if (pos + len > text.size()) {
            ++pos;
            return replacement;
        }
        for (std::size_t i = 1; i < len; ++i) {
            unsigned char c = byte(pos + i);
            if ((c & 0xC0) != 0x80) {
                ++pos;
                return replacement;
            }
            cp = (cp << 6) | (c & 0x3F);
        }
        if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            ++pos;
            return replacement;
        }
        pos += len;
        return cp;
    }

    inline void append_utf8(std::string& out, char32_t cp)
    {
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

    constexpr bool in_range(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

    /// Word characters: ASCII letters and digits, plus every non-ASCII code
    /// point outside the punctuation, symbol, space and control blocks.
    /// Combining marks count as word characters so decomposed accents stay
    /// attached to their base letter.
    constexpr bool is_word_char(char32_t cp)
    {
        if (cp < 0x80) {
            return in_range(cp, U'0', U'9') || in_range(cp, U'a', U'z') || in_range(cp, U'A', U'Z');
        }
        if (in_range(cp, 0x80, 0xBF)) {
            return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
        }
        if (cp == 0xD7 || cp == 0xF7) {
            return false;
        }
        return !(cp == 0xFFFD                          //
                 || in_range(cp, 0x2000, 0x206F)       // general punctuation, spaces
                 || in_range(cp, 0x20A0, 0x20CF)       // currency
                 || in_range(cp, 0x2190, 0x2BFF)       // arrows, math, shapes, dingbats
                 || in_range(cp, 0x2E00, 0x2E7F)       // supplemental punctuation
                 || in_range(cp, 0x3000, 0x303F)       // CJK symbols and punctuation
                 || in_range(cp, 0xD800, 0xF8FF)       // surrogates, private use
                 || in_range(cp, 0xFE00, 0xFE0F)       // variation selectors
                 || in_range(cp, 0xFE30, 0xFE4F)       // CJK compatibility forms
                 || in_range(cp, 0xFE50, 0xFE6F)       // small form variants
                 || in_range(cp, 0xFF00, 0xFF0F)       // fullwidth punctuation
                 || in_range(cp, 0xFF1A, 0xFF20)       //
                 || in_range(cp, 0xFF3B, 0xFF40)       //
                 || in_range(cp, 0xFF5B, 0xFF65)       //
                 || in_range(cp, 0xFFF0, 0xFFFF)       // specials
                 || in_range(cp, 0x1F000, 0x1FAFF));   // emoji, pictographs
    }

    /// Simple one-to-one lowercase mapping for Latin, Greek, Cyrillic,
    /// Armenian and fullwidth Latin. Other scripts are caseless or left as is.
    constexpr char32_t to_lower(char32_t cp)
    {
        if (in_range(cp, U'A', U'Z')) return cp + 0x20;
        if (cp < 0x80) return cp;
        if (in_range(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
        if (in_range(cp, 0x100, 0x137) || in_range(cp, 0x14A, 0x177)) return cp | 1;
        if (in_range(cp, 0x139, 0x148) || in_range(cp, 0x179, 0x17E)) return (cp & 1) ? cp + 1 : cp;
        if (cp == 0x178) return 0xFF;
        if (cp == 0x386) return 0x3AC;
        if (in_range(cp, 0x388, 0x38A)) return cp + 0x25;
        if (cp == 0x38C) return 0x3CC;
        if (in_range(cp, 0x38E, 0x38F)) return cp + 0x3F;
        if (in_range(cp, 0x391, 0x3AB) && cp != 0x3A2) return cp + 0x20;
        if (in_range(cp, 0x400, 0x40F)) return cp + 0x50;
        if (in_range(cp, 0x410, 0x42F)) return cp + 0x20;
        if (in_range(cp, 0x460, 0x481) || in_range(cp, 0x48A, 0x4BF) || in_range(cp, 0x4D0, 0x52F)) {
            return cp | 1;
        }
        if (cp == 0x4C0) return 0x4CF;
        if (in_range(cp, 0x4C1, 0x4CE)) return (cp & 1) ? cp + 1 : cp;
        if (in_range(cp, 0x531, 0x556)) return cp + 0x30;
        if (in_range(cp, 0x1E00, 0x1E95) || in_range(cp, 0x1EA0, 0x1EFF)) return cp | 1;
        if (in_range(cp, 0xFF21, 0xFF3A)) return cp + 0x20;
        return cp;
    }

}  // namespace detail

/// Lowercases `text` and splits it on maximal runs of non-word characters.
/// Empty fragments are dropped; order is preserved. This is the single
/// normalization rule shared by indexing, translation lookups and scoring.
inline std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        char32_t cp = detail::decode_utf8(text, pos);
        if (detail::is_word_char(cp)) {
            detail::append_utf8(current, detail::to_lower(cp));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i != 0) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

}  // namespace clir
