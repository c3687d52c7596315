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

#include <string>

#include "codegraph/frontend/ast.hpp"

namespace codegraph::frontend {

/// Renders a method back to source. Nested infix operands are always
/// parenthesized, so the output reparses to a structurally equal AST.
std::string print_method(const MethodAst& method);

std::string print_expr(const AstNode& expr);

}  // namespace codegraph::frontend
