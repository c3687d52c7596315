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

#include <span>
#include <string>
#include <string_view>

#include "codegraph/frontend/ast.hpp"
#include "codegraph/graph/sigma_graph.hpp"

namespace codegraph::graph {

/// Control-flow and data-flow graph of one method.
///
/// Node ids are assigned in a fixed order: ENTRY (0), EXIT (1), one data
/// node per parameter, then nodes in evaluation order of the body.
SigmaGraph build_sigma0(const frontend::MethodAst& ast, std::string method_id = {});

/// σ0 plus AST kinds on every node and first_use / last_use / alias /
/// control_dep edges. Node set and the σ0 edge prefix are identical to
/// build_sigma0 on the same AST.
SigmaGraph build_sigma1(const frontend::MethodAst& ast, std::string method_id = {});

SigmaGraph build_graph(const frontend::MethodAst& ast, Flavor flavor, std::string method_id = {});

// Feature strings.
std::string call_feature(std::string_view receiver_type, std::string_view method,
                         std::span<const std::string> arg_types);
std::string constructor_feature(std::string_view class_name, std::span<const std::string> arg_types);

/// Static type of an expression: declared type for variables, literal type
/// for literals, the class for `new`, "boolean" for comparisons and logical
/// operators, "String" for `+` with a String operand, "int" for arithmetic
/// on ints, "?" when unknown (call results, mixed arithmetic).
std::string static_type(const frontend::AstNode& expr, const frontend::MethodAst& method);

/// Feature of the graph node an AST element produces: the declared type for
/// variables, literal type for literals, the call/constructor format for
/// invocations, the operator lexeme for operators ("=" for assignments) and
/// the keyword for branching/looping statements.
std::string node_feature_string(const frontend::AstNode& element, const frontend::MethodAst& method);

}  // namespace codegraph::graph
