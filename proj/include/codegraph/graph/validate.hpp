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
#include <string_view>
#include <vector>

#include "codegraph/graph/sigma_graph.hpp"

namespace codegraph::graph {

enum class ViolationKind {
    MissingEntry,
    DuplicateEntry,
    MissingExit,
    DuplicateExit,
    EntryFeature,
    ExitFeature,
    BadNodeId,
    DanglingEdge,
    EntryOutDegree,
    BranchArity,
    Unreachable,
    EdgeEndpoint,
    Sigma1EdgeInSigma0,
    AstKindMismatch,
};

std::string_view to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::string detail;
};

/// Checks every structural invariant of a σ graph. An empty result means the
/// graph is valid. Inverse edges are checked against the rule of their base
/// type with endpoints swapped.
std::vector<Violation> validate_graph(const SigmaGraph& g);

}  // namespace codegraph::graph
