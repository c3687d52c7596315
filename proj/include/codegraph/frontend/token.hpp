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

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "codegraph/common/error.hpp"

namespace codegraph::frontend {

/// Half-open byte range [offset, offset + length) plus the 1-based
/// line/column of its first byte.
struct Span {
    std::uint32_t offset = 0;
    std::uint32_t length = 0;
    std::uint32_t line = 1;
    std::uint32_t column = 1;

    std::uint32_t end() const { return offset + length; }
    bool contains(const Span& other) const {
        return other.offset >= offset && other.end() <= end();
    }
    /// Smallest span covering both.
    static Span cover(const Span& a, const Span& b);
};

enum class TokenKind : std::uint8_t {
    Keyword,
    Identifier,
    IntLiteral,
    StringLiteral,
    BoolLiteral,
    Operator,
    Punct,
    End,
};

const char* to_string(TokenKind kind);

struct Token {
    TokenKind kind;
    std::string text;
    Span span;

    bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
    bool is_punct(std::string_view t) const { return is(TokenKind::Punct, t); }
    bool is_keyword(std::string_view t) const { return is(TokenKind::Keyword, t); }
    bool is_operator(std::string_view t) const { return is(TokenKind::Operator, t); }
};

using TokenSequence = std::vector<Token>;

class LexError : public Error {
public:
    LexError(const std::string& what, std::uint32_t line, std::uint32_t column);
    std::uint32_t line() const { return line_; }
    std::uint32_t column() const { return column_; }

private:
    std::uint32_t line_;
    std::uint32_t column_;
};

bool is_keyword(std::string_view word);
/// Binary operator lexemes of the language (excluding "=").
bool is_infix_operator(std::string_view lexeme);
/// Primitive type keywords usable as variable types.
bool is_primitive_type(std::string_view word);

/// Splits source text into tokens. Whitespace and comments are dropped. The
/// result never contains a TokenKind::End marker; the parser appends its own.
TokenSequence tokenize(std::string_view source);

}  // namespace codegraph::frontend
