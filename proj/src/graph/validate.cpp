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

#include "codegraph/graph/validate.hpp"

#include <deque>

namespace codegraph::graph {

std::string_view to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::MissingEntry: return "MissingEntry";
        case ViolationKind::DuplicateEntry: return "DuplicateEntry";
        case ViolationKind::MissingExit: return "MissingExit";
        case ViolationKind::DuplicateExit: return "DuplicateExit";
        case ViolationKind::EntryFeature: return "EntryFeature";
        case ViolationKind::ExitFeature: return "ExitFeature";
        case ViolationKind::BadNodeId: return "BadNodeId";
        case ViolationKind::DanglingEdge: return "DanglingEdge";
        case ViolationKind::EntryOutDegree: return "EntryOutDegree";
        case ViolationKind::BranchArity: return "BranchArity";
        case ViolationKind::Unreachable: return "Unreachable";
        case ViolationKind::EdgeEndpoint: return "EdgeEndpoint";
        case ViolationKind::Sigma1EdgeInSigma0: return "Sigma1EdgeInSigma0";
        case ViolationKind::AstKindMismatch: return "AstKindMismatch";
    }
    return "?";
}

namespace {

bool one_of(NodeType t, std::initializer_list<NodeType> set) {
    for (NodeType s : set) {
        if (s == t) return true;
    }
    return false;
}

// Endpoint rule for a base (non-inverse) edge type.
bool endpoints_ok(EdgeType base, NodeType src, NodeType dst) {
    using N = NodeType;
    switch (base) {
        case EdgeType::Dep:
        case EdgeType::Throw:
        case EdgeType::LastUse:
        case EdgeType::ControlDep:
            return src != N::Data && dst != N::Data;
        case EdgeType::Receiver:
        case EdgeType::Parameter:
        case EdgeType::Condition:
            return one_of(src, {N::Data, N::Action}) && one_of(dst, {N::Action, N::Control});
        case EdgeType::Definition:
            return dst == N::Data;
        case EdgeType::FirstUse:
            return src == N::Data && dst != N::Data;
        case EdgeType::Alias:
            return src == N::Data && dst == N::Data;
        default:
            return true;
    }
}

}  // namespace

std::vector<Violation> validate_graph(const SigmaGraph& g) {
    std::vector<Violation> out;
    auto report = [&](ViolationKind k, std::string detail) { out.push_back({k, std::move(detail)}); };
    const int n = g.num_nodes();

    int entry = -1, entries = 0, exits = 0;
    for (int i = 0; i < n; ++i) {
        const auto& node = g.nodes[i];
        if (node.id != i) report(ViolationKind::BadNodeId, "node at position " + std::to_string(i));
        if (node.ntype == NodeType::Entry) {
            ++entries;
            entry = i;
            if (node.feature != kEntryFeature) report(ViolationKind::EntryFeature, node.feature);
        } else if (node.ntype == NodeType::Exit) {
            ++exits;
            if (node.feature != kExitFeature) report(ViolationKind::ExitFeature, node.feature);
        }
        const bool want_kind = g.flavor == Flavor::Sigma1;
        if (node.ast_kind.has_value() != want_kind) {
            report(ViolationKind::AstKindMismatch, "node " + std::to_string(i));
        }
    }
    if (entries == 0) report(ViolationKind::MissingEntry, "");
    if (entries > 1) report(ViolationKind::DuplicateEntry, std::to_string(entries) + " entry nodes");
    if (exits == 0) report(ViolationKind::MissingExit, "");
    if (exits > 1) report(ViolationKind::DuplicateExit, std::to_string(exits) + " exit nodes");

    std::vector<int> dep_out(n, 0);
    std::vector<std::vector<int>> control_succ(n);
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        const auto& e = g.edges[k];
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
            report(ViolationKind::DanglingEdge, "edge " + std::to_string(k));
            continue;
        }
        if (g.flavor == Flavor::Sigma0 && is_sigma1_only(e.etype)) {
            report(ViolationKind::Sigma1EdgeInSigma0, std::string(to_string(e.etype)));
        }
        if (e.etype != EdgeType::Virtual) {
            const bool inv = is_inverse(e.etype);
            NodeType s = g.nodes[inv ? e.dst : e.src].ntype;
            NodeType d = g.nodes[inv ? e.src : e.dst].ntype;
            if (!endpoints_ok(base_of(e.etype), s, d)) {
                report(ViolationKind::EdgeEndpoint, std::string(to_string(e.etype)) + " " +
                                                        std::to_string(e.src) + "->" + std::to_string(e.dst));
            }
        }
        if (e.etype == EdgeType::Dep) ++dep_out[e.src];
        if (e.etype == EdgeType::Dep || e.etype == EdgeType::Throw) control_succ[e.src].push_back(e.dst);
    }

    if (entries == 1 && dep_out[entry] != 1) {
        report(ViolationKind::EntryOutDegree, std::to_string(dep_out[entry]) + " outgoing dep edges");
    }
    for (int i = 0; i < n; ++i) {
        const auto& node = g.nodes[i];
        if (node.ntype == NodeType::Control && node.feature == "if" && dep_out[i] != 2) {
            report(ViolationKind::BranchArity,
                   "if node " + std::to_string(i) + " has " + std::to_string(dep_out[i]) + " dep out-edges");
        }
    }

    if (entries == 1) {
        std::vector<char> seen(n, 0);
        std::deque<int> queue{entry};
        seen[entry] = 1;
        while (!queue.empty()) {
            int u = queue.front();
            queue.pop_front();
            for (int v : control_succ[u]) {
                if (!seen[v]) {
                    seen[v] = 1;
                    queue.push_back(v);
                }
            }
        }
        for (int i = 0; i < n; ++i) {
            NodeType t = g.nodes[i].ntype;
            if ((t == NodeType::Action || t == NodeType::Control) && !seen[i]) {
                report(ViolationKind::Unreachable, "node " + std::to_string(i) + " '" + g.nodes[i].feature + "'");
            }
        }
    }
    return out;
}

}  // namespace codegraph::graph
