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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codegraph/frontend/token.hpp"

namespace codegraph::graph {

enum class NodeType : std::uint8_t { Entry, Exit, Data, Action, Control };
inline constexpr int kNumNodeTypes = 5;

enum class Flavor : std::uint8_t { Sigma0, Sigma1 };

/// Edge types. The first kNumBaseEdgeTypes are produced by graph
/// construction; each has an inverse at `base + kNumBaseEdgeTypes`.
/// `Virtual` links graph nodes to a pooling node and is never serialized
/// as part of a method graph.
enum class EdgeType : std::uint8_t {
    Dep,
    Throw,
    Receiver,
    Parameter,
    Definition,
    Condition,
    Qualifier,
    FirstUse,
    LastUse,
    Alias,
    ControlDep,
    InvDep,
    InvThrow,
    InvReceiver,
    InvParameter,
    InvDefinition,
    InvCondition,
    InvQualifier,
    InvFirstUse,
    InvLastUse,
    InvAlias,
    InvControlDep,
    Virtual,
};
inline constexpr int kNumBaseEdgeTypes = 11;
inline constexpr int kNumEdgeTypes = 2 * kNumBaseEdgeTypes + 1;

constexpr int index_of(EdgeType t) { return static_cast<int>(t); }
constexpr int index_of(NodeType t) { return static_cast<int>(t); }

bool is_inverse(EdgeType t);
/// Maps r to inv_r and inv_r back to r. Virtual has no inverse.
EdgeType inverse_of(EdgeType t);
/// Strips the inverse marker.
EdgeType base_of(EdgeType t);
bool is_sigma1_only(EdgeType t);
bool is_control_edge(EdgeType t);

std::string_view to_string(NodeType t);
std::string_view to_string(EdgeType t);
std::string_view to_string(Flavor f);
std::optional<NodeType> parse_node_type(std::string_view s);
std::optional<EdgeType> parse_edge_type(std::string_view s);
std::optional<Flavor> parse_flavor(std::string_view s);

struct SigmaNode {
    int id = 0;
    NodeType ntype = NodeType::Data;
    std::string feature;
    std::optional<std::string> ast_kind;
    frontend::Span span;
};

struct SigmaEdge {
    int src = 0;
    EdgeType etype = EdgeType::Dep;
    int dst = 0;

    friend bool operator==(const SigmaEdge&, const SigmaEdge&) = default;
};

struct SigmaGraph {
    std::string method_id;
    Flavor flavor = Flavor::Sigma0;
    std::vector<SigmaNode> nodes;
    std::vector<SigmaEdge> edges;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    bool has_inverse_edges() const;
};

/// Equality over method id, flavor, node ids/types/features/ast kinds and
/// the ordered edge list. Spans are not part of the comparison (they are not
/// serialized).
bool structurally_equal(const SigmaGraph& a, const SigmaGraph& b);

inline constexpr std::string_view kEntryFeature = "ENTRY";
inline constexpr std::string_view kExitFeature = "EXIT";

}  // namespace codegraph::graph
