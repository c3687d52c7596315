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
#include <vector>

#include "codegraph/frontend/token.hpp"

namespace codegraph::frontend {

enum class AstKind : std::uint8_t {
    VarDecl,
    Assign,
    If,
    While,
    For,
    TryCatchFinally,
    Return,
    Throw,
    ExprStmt,
    Call,
    New,
    InfixOperator,
    Literal,
    VarRef,
    Block,
};

const char* to_string(AstKind kind);

/// One node of a method body.
///
/// Child layout per kind:
///   Block            statements...
///   VarDecl          [initializer]
///   Assign           value
///   If               condition, then-Block [, else-Block]
///   While            condition, body-Block
///   For              init-VarDecl, condition, update-Assign, body-Block
///   TryCatchFinally  try-Block, (catch-param VarDecl, catch-Block)... [, finally-Block]
///   Return           [value]
///   Throw            value
///   ExprStmt         expression
///   Call             [receiver,] arguments...
///   New              arguments...
///   InfixOperator    lhs, rhs
///   Literal, VarRef  none
struct AstNode {
    AstKind kind = AstKind::Block;
    Span span;
    /// Variable name (VarDecl, Assign, VarRef), method name (Call), class
    /// name (New), operator lexeme (InfixOperator), raw lexeme (Literal).
    std::string text;
    /// Declared type (VarDecl) or literal type (Literal).
    std::string type_name;
    /// Index into MethodAst::variables for VarDecl, Assign and VarRef.
    int var_id = -1;
    bool has_receiver = false;  // Call
    bool has_else = false;      // If
    bool has_finally = false;   // TryCatchFinally
    std::vector<AstNode> children;
};

struct VariableInfo {
    std::string name;
    std::string type;
    bool is_param = false;
    Span span;
};

struct Param {
    std::string type;
    std::string name;
    int var_id = -1;
    Span span;
};

struct MethodAst {
    std::string return_type;
    std::string name;
    std::vector<Param> params;
    AstNode body;  // always a Block
    /// Every declared variable, parameters first, in declaration order.
    std::vector<VariableInfo> variables;
    Span span;
};

/// Structural equality: kinds, names, types, literal lexemes, variable
/// binding and tree shape. Source spans are ignored.
bool structurally_equal(const MethodAst& a, const MethodAst& b);
bool structurally_equal(const AstNode& a, const AstNode& b);

/// Visits every node in pre-order.
template <typename Fn>
void walk(const AstNode& node, Fn&& fn) {
    fn(node);
    for (const auto& c : node.children) walk(c, fn);
}

}  // namespace codegraph::frontend
