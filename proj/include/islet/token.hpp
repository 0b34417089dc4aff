// Token model for the AST-dump scanner.
//
// A dump line is tokenized into the lexicon of interest; everything else
// on the line is water and produces no token at all.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace islet {

// Classification of one recognized lexeme. Everything not covered here is
// water and never reaches the token stream.
enum class TokenClass {
    Call,        // free/plain call node keyword (e.g. CallExpr)
    MemberCall,  // member call node keyword (e.g. CXXMemberCallExpr)
    Argument,    // declaration-reference keyword (e.g. DeclRefExpr)
    MemberRef,   // member access keyword (e.g. MemberExpr)
    ThisRef,     // this-expression keyword (e.g. CXXThisExpr)
    FuncDef,     // free function definition keyword
    MethodDef,   // method definition keyword
    ClassDef,    // class/record definition keyword
    Subscript,   // array subscript keyword
    BinaryOp,    // binary operator keyword
    UnaryOp,     // unary operator keyword
    Number,      // numeric literal keyword
    String,      // double-quoted run or string-literal keyword
    TypeText,    // single-quoted run (type annotations in the dump)
    Word,        // anything matching the word pattern that is not a keyword
};

/// Upper-case wire name used by dialect files, e.g. MEMBER_CALL.
std::string_view token_class_name(TokenClass cls);

/// Inverse of token_class_name. Empty optional for unknown names.
std::optional<TokenClass> token_class_from_name(std::string_view name);

struct Token {
    TokenClass cls = TokenClass::Word;
    std::string lexeme;       // never empty
    std::size_t column = 0;   // 0-based character offset within the line
};

// One scanned dump line: its tree nesting level plus the recognized tokens
// in left-to-right order. `land` indexes the first token produced by a
// keyword-map hit; -1 means the line is water to the grammar (its words
// and quoted runs may still carry payload for neighboring land lines).
struct LineEvent {
    int depth = 0;
    std::vector<Token> tokens;
    std::string raw;
    int land = -1;

    bool is_land() const { return land >= 0; }
    const Token& land_token() const { return tokens[static_cast<std::size_t>(land)]; }
};

inline std::string_view token_class_name(TokenClass cls) {
    switch (cls) {
        case TokenClass::Call: return "CALL";
        case TokenClass::MemberCall: return "MEMBER_CALL";
        case TokenClass::Argument: return "ARGUMENT";
        case TokenClass::MemberRef: return "MEMBER_REF";
        case TokenClass::ThisRef: return "THIS_REF";
        case TokenClass::FuncDef: return "FUNC_DEF";
        case TokenClass::MethodDef: return "METHOD_DEF";
        case TokenClass::ClassDef: return "CLASS_DEF";
        case TokenClass::Subscript: return "SUBSCRIPT";
        case TokenClass::BinaryOp: return "BINARY_OP";
        case TokenClass::UnaryOp: return "UNARY_OP";
        case TokenClass::Number: return "NUMBER";
        case TokenClass::String: return "STRING";
        case TokenClass::TypeText: return "TYPE_TEXT";
        case TokenClass::Word: return "WORD";
    }
    return "WORD";
}

inline std::optional<TokenClass> token_class_from_name(std::string_view name) {
    static constexpr TokenClass kAll[] = {
        TokenClass::Call,      TokenClass::MemberCall, TokenClass::Argument,
        TokenClass::MemberRef, TokenClass::ThisRef,    TokenClass::FuncDef,
        TokenClass::MethodDef, TokenClass::ClassDef,   TokenClass::Subscript,
        TokenClass::BinaryOp,  TokenClass::UnaryOp,    TokenClass::Number,
        TokenClass::String,    TokenClass::TypeText,   TokenClass::Word,
    };
    for (TokenClass cls : kAll) {
        if (token_class_name(cls) == name) return cls;
    }
    return std::nullopt;
}

} // namespace islet
