#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "commlab/script/source.hpp"

namespace commlab::script {

enum class TokenKind {
    Identifier,
    Keyword,  // for while if elseif else end break continue true false
    Number,
    String,
    Operator,  // + - * / ^ .* ./ .^ == ~= < <= > >= & | && || ~ = : '  (transpose)
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
    Newline,
    EndOfInput,
};

struct Token {
    TokenKind kind;
    std::string text;  // identifier name, operator spelling, decoded string literal
    double number = 0;
    SourcePos pos;
    bool space_before = false;  // whitespace separates this token from the previous one

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_op(std::string_view t) const { return is(TokenKind::Operator, t); }
    bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
};

/// Splits LabScript source into tokens. `%` starts a comment running to end of
/// line and `...` continues a statement on the next line. Throws SyntaxError on
/// an illegal character or an unterminated string.
std::vector<Token> tokenize(std::string_view source);

bool is_keyword(std::string_view word);
bool is_valid_identifier(std::string_view name);

std::string_view token_kind_name(TokenKind k);

}  // namespace commlab::script
