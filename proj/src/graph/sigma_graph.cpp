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

#include "codegraph/graph/sigma_graph.hpp"

#include "codegraph/common/error.hpp"

namespace codegraph::graph {

namespace {

constexpr std::array<std::string_view, kNumEdgeTypes> kEdgeNames = {
    "dep",           "throw",          "receiver",      "parameter",   "definition",
    "condition",     "qualifier",      "first_use",     "last_use",    "alias",
    "control_dep",   "inv_dep",        "inv_throw",     "inv_receiver", "inv_parameter",
    "inv_definition", "inv_condition", "inv_qualifier", "inv_first_use", "inv_last_use",
    "inv_alias",     "inv_control_dep", "virtual",
};

constexpr std::array<std::string_view, kNumNodeTypes> kNodeNames = {
    "entry", "exit", "data", "action", "control",
};

}  // namespace

bool is_inverse(EdgeType t) {
    int i = index_of(t);
    return i >= kNumBaseEdgeTypes && i < 2 * kNumBaseEdgeTypes;
}

EdgeType inverse_of(EdgeType t) {
    int i = index_of(t);
    if (t == EdgeType::Virtual) throw InternalError("virtual edges have no inverse");
    return static_cast<EdgeType>(i < kNumBaseEdgeTypes ? i + kNumBaseEdgeTypes : i - kNumBaseEdgeTypes);
}

EdgeType base_of(EdgeType t) { return is_inverse(t) ? inverse_of(t) : t; }

bool is_sigma1_only(EdgeType t) {
    switch (base_of(t)) {
        case EdgeType::FirstUse:
        case EdgeType::LastUse:
        case EdgeType::Alias:
        case EdgeType::ControlDep:
            return true;
        default:
            return false;
    }
}

bool is_control_edge(EdgeType t) {
    EdgeType b = base_of(t);
    return b == EdgeType::Dep || b == EdgeType::Throw;
}

std::string_view to_string(NodeType t) { return kNodeNames[index_of(t)]; }
std::string_view to_string(EdgeType t) { return kEdgeNames[index_of(t)]; }
std::string_view to_string(Flavor f) { return f == Flavor::Sigma0 ? "sigma0" : "sigma1"; }

std::optional<NodeType> parse_node_type(std::string_view s) {
    for (int i = 0; i < kNumNodeTypes; ++i) {
        if (kNodeNames[i] == s) return static_cast<NodeType>(i);
    }
    return std::nullopt;
}

std::optional<EdgeType> parse_edge_type(std::string_view s) {
    for (int i = 0; i < kNumEdgeTypes; ++i) {
        if (kEdgeNames[i] == s) return static_cast<EdgeType>(i);
    }
    return std::nullopt;
}

std::optional<Flavor> parse_flavor(std::string_view s) {
    if (s == "sigma0") return Flavor::Sigma0;
    if (s == "sigma1") return Flavor::Sigma1;
    return std::nullopt;
}

bool SigmaGraph::has_inverse_edges() const {
    for (const auto& e : edges) {
        if (is_inverse(e.etype)) return true;
    }
    return false;
}

bool structurally_equal(const SigmaGraph& a, const SigmaGraph& b) {
    if (a.method_id != b.method_id || a.flavor != b.flavor || a.nodes.size() != b.nodes.size() ||
        a.edges != b.edges) {
        return false;
    }
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        const auto& x = a.nodes[i];
        const auto& y = b.nodes[i];
        if (x.id != y.id || x.ntype != y.ntype || x.feature != y.feature || x.ast_kind != y.ast_kind) {
            return false;
        }
    }
    return true;
}

}  // namespace codegraph::graph
