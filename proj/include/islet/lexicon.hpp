// Per-dialect scanning tables.
//
// A lexicon is pure data: a keyword-to-class map plus the character
// patterns for words and quoted runs. Dialects can be compiled in or
// loaded from a text file at runtime, so supporting a new dump format
// never requires touching the scanner.

#pragma once

#include <array>
#include <cctype>
#include <istream>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "islet/token.hpp"

namespace islet {

// Raw, serializable form of a dialect.
struct LexiconTable {
    std::string dialect_name;
    std::unordered_map<std::string, TokenClass> keyword_map;
    // Word shape as a character-class regex: first class matches the start
    // character, second (starred) class matches continuation characters.
    std::string word_pattern = "[A-Za-z0-9][A-Za-z0-9_:~<>.]*";
    std::string dquote_pattern = R"("(\\.|[^"\\])*")";
    std::string squote_pattern = R"('[^']*')";
};

/// Built-in table for C++ AST dumps.
inline LexiconTable cpp_lexicon() {
    LexiconTable t;
    t.dialect_name = "cpp";
    t.keyword_map = {
        {"CallExpr", TokenClass::Call},
        {"CXXMemberCallExpr", TokenClass::MemberCall},
        {"DeclRefExpr", TokenClass::Argument},
        {"MemberExpr", TokenClass::MemberRef},
        {"CXXThisExpr", TokenClass::ThisRef},
        {"FunctionDecl", TokenClass::FuncDef},
        {"CXXMethodDecl", TokenClass::MethodDef},
        {"CXXRecordDecl", TokenClass::ClassDef},
        {"ArraySubscriptExpr", TokenClass::Subscript},
        {"BinaryOperator", TokenClass::BinaryOp},
        {"UnaryOperator", TokenClass::UnaryOp},
        {"IntegerLiteral", TokenClass::Number},
        {"FloatingLiteral", TokenClass::Number},
        {"StringLiteral", TokenClass::String},
    };
    return t;
}

/// Built-in table for Objective-C AST dumps: the C++ table plus the
/// Objective-C method and message nodes.
inline LexiconTable objc_lexicon() {
    LexiconTable t = cpp_lexicon();
    t.dialect_name = "objc";
    t.keyword_map.emplace("ObjCMethodDecl", TokenClass::MethodDef);
    t.keyword_map.emplace("ObjCMessageExpr", TokenClass::MemberCall);
    return t;
}

namespace detail {

// Character-class membership compiled from a pattern of the shape
// [set][set]* (the only shape the built-in dialects use). Anything more
// exotic in a user dialect falls back to std::regex.
struct CharClass {
    std::array<bool, 256> mask{};
    bool contains(unsigned char c) const { return mask[c]; }
};

// Parses one bracketed class starting at pos (which must point at '[').
// Returns the class and advances pos past the closing ']'. Throws on
// malformed input; callers treat that as "use the regex fallback".
inline CharClass parse_char_class(std::string_view pattern, std::size_t& pos) {
    if (pos >= pattern.size() || pattern[pos] != '[')
        throw std::invalid_argument("expected '['");
    ++pos;
    CharClass cls;
    bool first = true;
    while (pos < pattern.size() && (pattern[pos] != ']' || first)) {
        first = false;
        unsigned char lo;
        if (pattern[pos] == '\\' && pos + 1 < pattern.size()) {
            lo = static_cast<unsigned char>(pattern[pos + 1]);
            pos += 2;
        } else {
            lo = static_cast<unsigned char>(pattern[pos]);
            ++pos;
        }
        unsigned char hi = lo;
        if (pos + 1 < pattern.size() && pattern[pos] == '-' && pattern[pos + 1] != ']') {
            ++pos;
            if (pattern[pos] == '\\' && pos + 1 < pattern.size()) ++pos;
            hi = static_cast<unsigned char>(pattern[pos]);
            ++pos;
        }
        for (unsigned c = lo; c <= hi; ++c) cls.mask[c] = true;
    }
    if (pos >= pattern.size()) throw std::invalid_argument("unterminated class");
    ++pos; // closing ']'
    return cls;
}

} // namespace detail

// A lexicon compiled for scanning: O(1) keyword lookup and character-class
// tests instead of per-character regex work.
class Lexicon {
public:
    explicit Lexicon(LexiconTable table) : table_(std::move(table)) {
        compile_word_pattern();
        compile_quote(table_.dquote_pattern, dquote_char_, dquote_escape_);
        compile_quote(table_.squote_pattern, squote_char_, squote_escape_);
    }

    const LexiconTable& table() const { return table_; }
    const std::string& dialect_name() const { return table_.dialect_name; }

    std::optional<TokenClass> keyword(std::string_view word) const {
        auto it = table_.keyword_map.find(std::string(word));
        if (it == table_.keyword_map.end()) return std::nullopt;
        return it->second;
    }

    bool word_start(unsigned char c) const {
        return fast_word_ ? start_.contains(c) : regex_word_start(c);
    }
    bool word_continue(unsigned char c) const {
        return fast_word_ ? cont_.contains(c) : regex_word_continue(c);
    }

    char dquote_char() const { return dquote_char_; }
    bool dquote_allows_escape() const { return dquote_escape_; }
    char squote_char() const { return squote_char_; }
    bool squote_allows_escape() const { return squote_escape_; }

private:
    void compile_word_pattern() {
        try {
            std::size_t pos = 0;
            const std::string& p = table_.word_pattern;
            start_ = detail::parse_char_class(p, pos);
            cont_ = detail::parse_char_class(p, pos);
            if (pos + 1 != p.size() || p[pos] != '*')
                throw std::invalid_argument("expected trailing '*'");
            fast_word_ = true;
        } catch (const std::invalid_argument&) {
            fast_word_ = false;
            word_regex_ = std::regex(table_.word_pattern);
        }
    }

    static void compile_quote(const std::string& pattern, char& quote, bool& escape) {
        quote = pattern.empty() ? '\0' : pattern.front();
        escape = pattern.find("\\\\") != std::string::npos;
    }

    bool regex_word_start(unsigned char c) const {
        char buf[2] = {static_cast<char>(c), '\0'};
        return std::regex_search(buf, buf + 1, word_regex_,
                                 std::regex_constants::match_continuous);
    }
    bool regex_word_continue(unsigned char c) const {
        // Without structure information the best conservative answer is the
        // same single-character probe used for start characters.
        return regex_word_start(c) || c == '_' || c == ':';
    }

    LexiconTable table_;
    bool fast_word_ = true;
    detail::CharClass start_;
    detail::CharClass cont_;
    std::regex word_regex_;
    char dquote_char_ = '"';
    bool dquote_escape_ = true;
    char squote_char_ = '\'';
    bool squote_escape_ = false;
};

/// Parses a dialect definition. Format, one entry per line:
///   keyword<TAB or spaces>TOKEN_CLASS
/// with optional directives "name <dialect>", "word <pattern>",
/// "dquote <pattern>", "squote <pattern>". '#' starts a comment.
/// Throws std::runtime_error with a line number on malformed input.
inline LexiconTable parse_dialect(std::istream& in, std::string_view source_name) {
    LexiconTable t;
    t.dialect_name = std::string(source_name);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        std::ostringstream msg;
        msg << source_name << ":" << lineno << ": " << what;
        throw std::runtime_error(msg.str());
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string key, value;
        if (!(fields >> key)) continue; // blank line
        if (!(fields >> value)) fail("expected two fields: '" + key + "'");
        std::string extra;
        if (fields >> extra) fail("trailing text after '" + value + "'");
        if (key == "name") {
            t.dialect_name = value;
        } else if (key == "word") {
            t.word_pattern = value;
        } else if (key == "dquote") {
            t.dquote_pattern = value;
        } else if (key == "squote") {
            t.squote_pattern = value;
        } else {
            auto cls = token_class_from_name(value);
            if (!cls) fail("unknown token class '" + value + "'");
            t.keyword_map[key] = *cls;
        }
    }
    return t;
}

} // namespace islet
