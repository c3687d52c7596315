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

#include "codegraph/frontend/ast.hpp"

namespace codegraph::frontend {

const char* to_string(AstKind kind) {
    switch (kind) {
        case AstKind::VarDecl: return "VarDecl";
        case AstKind::Assign: return "Assign";
        case AstKind::If: return "If";
        case AstKind::While: return "While";
        case AstKind::For: return "For";
        case AstKind::TryCatchFinally: return "TryCatchFinally";
        case AstKind::Return: return "Return";
        case AstKind::Throw: return "Throw";
        case AstKind::ExprStmt: return "ExprStmt";
        case AstKind::Call: return "Call";
        case AstKind::New: return "New";
        case AstKind::InfixOperator: return "InfixOperator";
        case AstKind::Literal: return "Literal";
        case AstKind::VarRef: return "VarRef";
        case AstKind::Block: return "Block";
    }
    return "?";
}

bool structurally_equal(const AstNode& a, const AstNode& b) {
    if (a.kind != b.kind || a.text != b.text || a.type_name != b.type_name || a.var_id != b.var_id ||
        a.has_receiver != b.has_receiver || a.has_else != b.has_else || a.has_finally != b.has_finally ||
        a.children.size() != b.children.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!structurally_equal(a.children[i], b.children[i])) return false;
    }
    return true;
}

bool structurally_equal(const MethodAst& a, const MethodAst& b) {
    if (a.name != b.name || a.return_type != b.return_type || a.params.size() != b.params.size() ||
        a.variables.size() != b.variables.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        if (a.params[i].type != b.params[i].type || a.params[i].name != b.params[i].name) return false;
    }
    for (std::size_t i = 0; i < a.variables.size(); ++i) {
        const auto& x = a.variables[i];
        const auto& y = b.variables[i];
        if (x.name != y.name || x.type != y.type || x.is_param != y.is_param) return false;
    }
    return structurally_equal(a.body, b.body);
}

}  // namespace codegraph::frontend
