// Copyright (c) 2026 The codegraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <array>

#include "codegraph/frontend/token.hpp"

namespace codegraph::frontend {

namespace {

constexpr std::array<std::string_view, 15> kKeywords = {
    "boolean", "catch", "else",  "false", "finally", "for",   "if",   "int",
    "new",     "return", "throw", "true",  "try",     "void", "while",
};

constexpr std::array<std::string_view, 13> kInfixOperators = {
    "+", "-", "*", "/", "%", "==", "!=", "<", ">", "<=", ">=", "&&", "||",
};

bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}

bool ident_part(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    TokenSequence run() {
        TokenSequence out;
        while (true) {
            skip_trivia();
            if (pos_ >= src_.size()) break;
            out.push_back(next_token());
        }
        return out;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    std::uint32_t line_ = 1;
    std::uint32_t col_ = 1;

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw LexError(msg, line_, col_); }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                std::uint32_t l = line_, col = col_;
                advance();
                advance();
                while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
                if (pos_ >= src_.size()) throw LexError("unterminated block comment", l, col);
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    Token make(TokenKind kind, std::size_t start, std::uint32_t line, std::uint32_t col) const {
        Token t;
        t.kind = kind;
        t.text = std::string(src_.substr(start, pos_ - start));
        t.span = Span{static_cast<std::uint32_t>(start), static_cast<std::uint32_t>(pos_ - start),
                      line, col};
        return t;
    }

    Token next_token() {
        const std::size_t start = pos_;
        const std::uint32_t line = line_, col = col_;
        const char c = peek();

        if (ident_start(c)) {
            while (ident_part(peek())) advance();
            Token t = make(TokenKind::Identifier, start, line, col);
            if (t.text == "true" || t.text == "false") {
                t.kind = TokenKind::BoolLiteral;
            } else if (is_keyword(t.text)) {
                t.kind = TokenKind::Keyword;
            }
            return t;
        }
        if (digit(c)) {
            while (digit(peek())) advance();
            if (ident_start(peek())) {
                throw LexError("invalid numeric literal", line, col);
            }
            return make(TokenKind::IntLiteral, start, line, col);
        }
        if (c == '"') {
            advance();
            while (true) {
                if (pos_ >= src_.size() || peek() == '\n') {
                    throw LexError("unterminated string literal", line, col);
                }
                char s = peek();
                if (s == '"') {
                    advance();
                    break;
                }
                if (s == '\\') {
                    advance();
                    char e = peek();
                    if (e != '"' && e != '\\' && e != 'n' && e != 't' && e != 'r') {
                        fail("invalid escape sequence");
                    }
                }
                advance();
            }
            return make(TokenKind::StringLiteral, start, line, col);
        }

        // Two-character operators first (longest match).
        const char n = peek(1);
        if ((c == '=' && n == '=') || (c == '!' && n == '=') || (c == '<' && n == '=') ||
            (c == '>' && n == '=') || (c == '&' && n == '&') || (c == '|' && n == '|')) {
            advance();
            advance();
            return make(TokenKind::Operator, start, line, col);
        }
        switch (c) {
            case '+': case '-': case '*': case '/': case '%': case '<': case '>': case '=':
                advance();
                return make(TokenKind::Operator, start, line, col);
            case '(': case ')': case '{': case '}': case ',': case ';': case '.':
                advance();
                return make(TokenKind::Punct, start, line, col);
            default:
                break;
        }
        std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                ? "byte 0x" + std::to_string(static_cast<unsigned char>(c))
                                : std::string("'") + c + "'";
        fail("unexpected character " + shown);
    }
};

}  // namespace

Span Span::cover(const Span& a, const Span& b) {
    const Span& first = a.offset <= b.offset ? a : b;
    std::uint32_t end = std::max(a.end(), b.end());
    return Span{first.offset, end - first.offset, first.line, first.column};
}

const char* to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Keyword: return "kw";
        case TokenKind::Identifier: return "ident";
        case TokenKind::IntLiteral:
        case TokenKind::StringLiteral:
        case TokenKind::BoolLiteral: return "lit";
        case TokenKind::Operator: return "op";
        case TokenKind::Punct: return "punc";
        case TokenKind::End: return "eof";
    }
    return "?";
}

LexError::LexError(const std::string& what, std::uint32_t line, std::uint32_t column)
    : Error("lex error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_infix_operator(std::string_view lexeme) {
    return std::find(kInfixOperators.begin(), kInfixOperators.end(), lexeme) != kInfixOperators.end();
}

bool is_primitive_type(std::string_view word) { return word == "int" || word == "boolean"; }

TokenSequence tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace codegraph::frontend
