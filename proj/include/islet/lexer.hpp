// Line scanner for textual AST dumps.
//
// The scanner is total: any byte sequence yields a (possibly empty) token
// stream. Recognized lexemes become tokens, the rest of the line is
// consumed silently. Tree nesting is recovered from the box-drawing
// connector prefix that dump tools print before each node.

#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "islet/lexicon.hpp"
#include "islet/token.hpp"

namespace islet {

/// Removes ANSI escape sequences (CSI, OSC, and two-byte escapes).
/// Total and idempotent; never throws.
inline std::string strip_ansi(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c != 0x1b) {
            out.push_back(static_cast<char>(c));
            ++i;
            continue;
        }
        if (i + 1 >= n) break; // lone ESC at end of input
        unsigned char next = static_cast<unsigned char>(text[i + 1]);
        if (next == '[') {
            // CSI: parameter bytes 0x30..0x3f, intermediate 0x20..0x2f,
            // one final byte 0x40..0x7e.
            i += 2;
            while (i < n) {
                unsigned char b = static_cast<unsigned char>(text[i]);
                ++i;
                if (b >= 0x40 && b <= 0x7e) break;
            }
        } else if (next == ']') {
            // OSC: runs to BEL or ESC-backslash.
            i += 2;
            while (i < n) {
                unsigned char b = static_cast<unsigned char>(text[i]);
                if (b == 0x07) {
                    ++i;
                    break;
                }
                if (b == 0x1b && i + 1 < n && text[i + 1] == '\\') {
                    i += 2;
                    break;
                }
                ++i;
            }
        } else {
            i += 2; // ESC plus one designator byte
        }
    }
    return out;
}

/// Replaces invalid UTF-8 sequences with U+FFFD. ASCII passes through
/// untouched; total and idempotent.
inline std::string sanitize_utf8(std::string_view text) {
    static constexpr char kReplacement[] = "\xef\xbf\xbd";
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto cont = [&](std::size_t k) {
        return i + k < n &&
               (static_cast<unsigned char>(text[i + k]) & 0xc0) == 0x80;
    };
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
            ++i;
        } else if (c >= 0xc2 && c <= 0xdf && cont(1)) {
            out.append(text.substr(i, 2));
            i += 2;
        } else if (c == 0xe0 && i + 1 < n &&
                   static_cast<unsigned char>(text[i + 1]) >= 0xa0 &&
                   static_cast<unsigned char>(text[i + 1]) <= 0xbf && cont(2)) {
            out.append(text.substr(i, 3));
            i += 3;
        } else if (((c >= 0xe1 && c <= 0xec) || c == 0xee || c == 0xef) &&
                   cont(1) && cont(2)) {
            out.append(text.substr(i, 3));
            i += 3;
        } else if (c == 0xed && i + 1 < n &&
                   static_cast<unsigned char>(text[i + 1]) >= 0x80 &&
                   static_cast<unsigned char>(text[i + 1]) <= 0x9f && cont(2)) {
            out.append(text.substr(i, 3));
            i += 3;
        } else if (c == 0xf0 && i + 1 < n &&
                   static_cast<unsigned char>(text[i + 1]) >= 0x90 &&
                   static_cast<unsigned char>(text[i + 1]) <= 0xbf && cont(2) &&
                   cont(3)) {
            out.append(text.substr(i, 4));
            i += 4;
        } else if (c >= 0xf1 && c <= 0xf3 && cont(1) && cont(2) && cont(3)) {
            out.append(text.substr(i, 4));
            i += 4;
        } else if (c == 0xf4 && i + 1 < n &&
                   static_cast<unsigned char>(text[i + 1]) >= 0x80 &&
                   static_cast<unsigned char>(text[i + 1]) <= 0x8f && cont(2) &&
                   cont(3)) {
            out.append(text.substr(i, 4));
            i += 4;
        } else {
            out.append(kReplacement);
            ++i;
        }
    }
    return out;
}

/// Length of the leading connector prefix: spaces, '|', '-', and a quote
/// or backtick immediately followed by '-' (the last-sibling connectors
/// "`-" and "'-"). Scanning of the line proper starts after this prefix.
inline std::size_t connector_prefix_len(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == ' ' || c == '|' || c == '-') {
            ++i;
        } else if ((c == '`' || c == '\'') && i + 1 < line.size() &&
                   line[i + 1] == '-') {
            ++i;
        } else {
            break;
        }
    }
    return i;
}

/// Nesting depth encoded by the connector prefix. The root node has no
/// prefix and sits at depth 0; each further level adds one two-column
/// connector cell after the initial two-column stem.
inline int depth_of(std::string_view line) {
    std::size_t prefix = connector_prefix_len(line);
    if (prefix == 0) return 0;
    int cells = static_cast<int>(prefix) / 2;
    return std::max(0, cells - 1);
}

namespace detail {

// Consumes a balanced <...> run starting at pos (line[pos] must be '<').
// Returns the position after the closing '>', or pos + 1 when no balanced
// close exists on the line.
inline std::size_t skip_angle_run(std::string_view line, std::size_t pos) {
    int nest = 0;
    for (std::size_t j = pos; j < line.size(); ++j) {
        if (line[j] == '<') {
            ++nest;
        } else if (line[j] == '>') {
            if (--nest == 0) return j + 1;
        }
    }
    return pos + 1;
}

// Declaration-kind markers that dump tools print before a referenced
// declaration's quoted name ("... lvalue Var 0x1234 'cin' 'istream'").
// A single-quoted identifier right after one of these is a name, not a
// type annotation.
inline bool is_decl_marker(std::string_view word) {
    static constexpr std::string_view kMarkers[] = {
        "Var",           "ParmVar",     "Function",
        "CXXMethod",     "Field",       "EnumConstant",
        "ImplicitParam", "NonTypeTemplateParm",
    };
    for (std::string_view m : kMarkers)
        if (word == m) return true;
    return false;
}

inline bool is_hex_id(std::string_view word) {
    if (word.size() < 3 || word[0] != '0' || (word[1] != 'x' && word[1] != 'X'))
        return false;
    return std::all_of(word.begin() + 2, word.end(), [](unsigned char c) {
        return std::isxdigit(c) != 0;
    });
}

inline bool identifier_shaped(std::string_view text, const Lexicon& lex) {
    if (text.empty() || !lex.word_start(static_cast<unsigned char>(text[0])))
        return false;
    return std::all_of(text.begin() + 1, text.end(), [&](char c) {
        return lex.word_continue(static_cast<unsigned char>(c));
    });
}

// True when the single-quoted run that is about to be emitted names a
// declaration rather than annotating a type: the preceding token is a
// decl-kind marker, optionally with the declaration's node id between.
inline bool quoted_run_is_name(const std::vector<Token>& tokens) {
    if (tokens.empty()) return false;
    const Token& last = tokens.back();
    if (last.cls != TokenClass::Word) return false;
    if (is_decl_marker(last.lexeme)) return true;
    if (!is_hex_id(last.lexeme) || tokens.size() < 2) return false;
    const Token& prev = tokens[tokens.size() - 2];
    return prev.cls == TokenClass::Word && is_decl_marker(prev.lexeme);
}

} // namespace detail

/// Scans one dump line. `line` must not contain newline characters;
/// strip ANSI sequences first (scan_text does both).
inline LineEvent scan_line(std::string_view line, const Lexicon& lex) {
    LineEvent event;
    event.raw = std::string(line);
    event.depth = depth_of(line);

    std::size_t pos = connector_prefix_len(line);
    const std::size_t n = line.size();
    while (pos < n) {
        unsigned char c = static_cast<unsigned char>(line[pos]);
        if (c == static_cast<unsigned char>(lex.dquote_char())) {
            std::size_t j = pos + 1;
            bool closed = false;
            while (j < n) {
                if (lex.dquote_allows_escape() && line[j] == '\\' && j + 1 < n) {
                    j += 2;
                    continue;
                }
                if (line[j] == lex.dquote_char()) {
                    closed = true;
                    break;
                }
                ++j;
            }
            if (closed) {
                event.tokens.push_back({TokenClass::String,
                                        std::string(line.substr(pos, j + 1 - pos)),
                                        pos});
                pos = j + 1;
            } else {
                ++pos; // unterminated quote is water
            }
        } else if (c == static_cast<unsigned char>(lex.squote_char())) {
            std::size_t j = line.find(lex.squote_char(), pos + 1);
            if (j != std::string_view::npos) {
                if (j > pos + 1) {
                    std::string inner(line.substr(pos + 1, j - pos - 1));
                    TokenClass cls = TokenClass::TypeText;
                    if (detail::identifier_shaped(inner, lex) &&
                        detail::quoted_run_is_name(event.tokens))
                        cls = TokenClass::Word;
                    event.tokens.push_back({cls, std::move(inner), pos});
                }
                pos = j + 1;
            } else {
                ++pos;
            }
        } else if (c == '<') {
            // Source-range annotations like <line:4:3, col:21> are water.
            pos = detail::skip_angle_run(line, pos);
        } else if (lex.word_start(c)) {
            std::size_t j = pos + 1;
            while (j < n && lex.word_continue(static_cast<unsigned char>(line[j])))
                ++j;
            std::string word(line.substr(pos, j - pos));
            auto cls = lex.keyword(word);
            if (cls && event.land < 0)
                event.land = static_cast<int>(event.tokens.size());
            event.tokens.push_back(
                {cls.value_or(TokenClass::Word), std::move(word), pos});
            pos = j;
        } else {
            ++pos; // water
        }
    }
    return event;
}

/// Scans a whole dump: strips ANSI noise, repairs invalid UTF-8, splits
/// into lines, scans each. Total; never throws on any input bytes.
inline std::vector<LineEvent> scan_text(std::string_view text, const Lexicon& lex) {
    std::string clean = sanitize_utf8(strip_ansi(text));
    std::vector<LineEvent> events;
    std::size_t start = 0;
    while (start <= clean.size()) {
        std::size_t end = clean.find('\n', start);
        std::string_view line;
        if (end == std::string::npos) {
            if (start == clean.size()) break;
            line = std::string_view(clean).substr(start);
            start = clean.size() + 1;
        } else {
            line = std::string_view(clean).substr(start, end - start);
            start = end + 1;
        }
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        events.push_back(scan_line(line, lex));
    }
    return events;
}

} // namespace islet
