#include "commlab/script/lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>

namespace commlab::script {

namespace {

constexpr std::array kKeywords = {"for",   "while", "if",       "elseif", "else", "end",
                                  "break", "continue", "true", "false"};

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool digit(char c) {
    return c >= '0' && c <= '9';
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        bool space = false;
        while (i_ < src_.size()) {
            const char c = src_[i_];
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
                space = true;
                continue;
            }
            if (c == '%') {
                while (i_ < src_.size() && src_[i_] != '\n') advance();
                space = true;
                continue;
            }
            if (c == '.' && src_.substr(i_, 3) == "...") {
                // continuation: swallow the rest of the line including the newline
                while (i_ < src_.size() && src_[i_] != '\n') advance();
                if (i_ < src_.size()) advance();
                space = true;
                continue;
            }
            Token tok = next(out, space);
            tok.space_before = space || out.empty();
            out.push_back(std::move(tok));
            space = false;
        }
        Token eof{TokenKind::EndOfInput, "", 0, pos(), true};
        out.push_back(eof);
        return out;
    }

private:
    SourcePos pos() const { return {line_, col_}; }

    void advance() {
        if (src_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }

    char peek(std::size_t k = 0) const {
        return i_ + k < src_.size() ? src_[i_ + k] : '\0';
    }

    static bool quote_is_transpose(const std::vector<Token>& prev, bool space) {
        if (prev.empty() || space) return false;
        const Token& t = prev.back();
        switch (t.kind) {
        case TokenKind::Identifier:
        case TokenKind::Number:
        case TokenKind::RParen:
        case TokenKind::RBracket:
        case TokenKind::RBrace: return true;
        case TokenKind::Operator: return t.text == "'";
        case TokenKind::Keyword: return t.text == "end";
        default: return false;
        }
    }

    Token next(const std::vector<Token>& prev, bool space_before) {
        const SourcePos start = pos();
        const char c = peek();

        if (c == '\n') {
            advance();
            return {TokenKind::Newline, "\n", 0, start};
        }
        if (ident_start(c)) {
            std::size_t b = i_;
            while (i_ < src_.size() && ident_char(src_[i_])) advance();
            std::string word(src_.substr(b, i_ - b));
            const auto kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
            return {kind, std::move(word), 0, start};
        }
        if (digit(c) || (c == '.' && digit(peek(1)))) return number(start);
        if (c == '\'') {
            if (quote_is_transpose(prev, space_before)) {
                advance();
                return {TokenKind::Operator, "'", 0, start};
            }
            return string(start);
        }

        switch (c) {
        case '(': advance(); return {TokenKind::LParen, "(", 0, start};
        case ')': advance(); return {TokenKind::RParen, ")", 0, start};
        case '[': advance(); return {TokenKind::LBracket, "[", 0, start};
        case ']': advance(); return {TokenKind::RBracket, "]", 0, start};
        case '{': advance(); return {TokenKind::LBrace, "{", 0, start};
        case '}': advance(); return {TokenKind::RBrace, "}", 0, start};
        case ',': advance(); return {TokenKind::Comma, ",", 0, start};
        case ';': advance(); return {TokenKind::Semicolon, ";", 0, start};
        default: break;
        }

        static constexpr std::array<std::string_view, 11> two = {".*", "./", ".^", "==", "~=", "!=",
                                                                 "<=", ">=", "&&", "||", ".'"};
        for (auto op : two) {
            if (src_.substr(i_, 2) == op) {
                advance();
                advance();
                std::string text(op);
                if (text == "!=") text = "~=";
                if (text == ".'") text = "'";
                return {TokenKind::Operator, text, 0, start};
            }
        }
        static constexpr std::string_view one = "+-*/^<>&|~!=:";
        if (one.find(c) != std::string_view::npos) {
            advance();
            std::string text(1, c);
            if (text == "!") text = "~";
            return {TokenKind::Operator, text, 0, start};
        }

        std::string shown;
        const auto uc = static_cast<unsigned char>(c);
        if (std::isprint(uc)) {
            shown = std::string("'") + c + "'";
        } else {
            static constexpr char hex[] = "0123456789ABCDEF";
            shown = std::string("byte 0x") + hex[uc >> 4] + hex[uc & 15];
        }
        throw SyntaxError("illegal character " + shown, start);
    }

    Token number(SourcePos start) {
        const std::size_t b = i_;
        while (digit(peek())) advance();
        if (peek() == '.' && peek(1) != '*' && peek(1) != '/' && peek(1) != '^' && peek(1) != '\'') {
            advance();
            while (digit(peek())) advance();
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
            advance();
            if (peek() == '+' || peek() == '-') advance();
            while (digit(peek())) advance();
        }
        std::string text(src_.substr(b, i_ - b));
        double value = std::strtod(text.c_str(), nullptr);
        if (ident_start(peek())) throw SyntaxError("malformed number '" + text + peek() + "'", start);
        return {TokenKind::Number, std::move(text), value, start};
    }

    Token string(SourcePos start) {
        advance();  // opening quote
        std::string value;
        while (true) {
            if (i_ >= src_.size() || src_[i_] == '\n') throw SyntaxError("unterminated string", start);
            if (src_[i_] == '\'') {
                if (peek(1) == '\'') {
                    value += '\'';
                    advance();
                    advance();
                    continue;
                }
                advance();
                break;
            }
            value += src_[i_];
            advance();
        }
        return {TokenKind::String, std::move(value), 0, start};
    }

    std::string_view src_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

bool is_keyword(std::string_view word) {
    for (auto k : kKeywords)
        if (word == k) return true;
    return false;
}

bool is_valid_identifier(std::string_view name) {
    if (name.empty() || !ident_start(name[0])) return false;
    for (char c : name)
        if (!ident_char(c)) return false;
    return !is_keyword(name);
}

std::string_view token_kind_name(TokenKind k) {
    switch (k) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Number: return "number";
    case TokenKind::String: return "string";
    case TokenKind::Operator: return "operator";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Newline: return "end of line";
    case TokenKind::EndOfInput: return "end of input";
    }
    return "?";
}

std::vector<Token> tokenize(std::string_view source) {
    return Lexer(source).run();
}

}  // namespace commlab::script
