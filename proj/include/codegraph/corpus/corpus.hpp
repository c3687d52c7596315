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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codegraph/common/error.hpp"
#include "codegraph/graph/sigma_graph.hpp"

namespace codegraph::corpus {

enum class Tying { Strict, Weak, Untied };

std::string_view to_string(Tying t);

/// True when a node with this feature and type is context-invariant:
/// entry/exit nodes, control keywords and operator actions.
bool is_strict_feature(std::string_view feature, graph::NodeType ntype);

/// The fixed, lexicographically ordered set of strict features. Rows of the
/// global embedding matrix follow this order, so checkpoints stay valid
/// across corpora.
const std::vector<std::string>& strict_feature_universe();

/// Strict by feature kind; otherwise Weak when the feature occurs at least
/// twice corpus-wide (`occurrences`), Untied when it is unique.
Tying classify_tying(std::string_view feature, graph::NodeType ntype, std::size_t occurrences);

struct NodeRef {
    int graph = 0;
    int node = 0;
    friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

struct TyingIndex {
    /// feature -> global embedding row.
    std::map<std::string, int> strict_vocab;
    /// weak feature -> every node carrying it, in (graph, node) order.
    std::map<std::string, std::vector<NodeRef>> weak_groups;

    /// Global row for a strict node, -1 otherwise.
    int strict_row(std::string_view feature, graph::NodeType ntype) const;
    bool is_weak(std::string_view feature) const { return weak_groups.count(std::string(feature)) > 0; }
};

enum class Split { Train, Valid, Test };
std::string_view to_string(Split s);
Split parse_split(std::string_view s);

struct Corpus {
    std::vector<graph::SigmaGraph> graphs;
    /// Package of each graph (parallel to `graphs`).
    std::vector<std::string> graph_package;
    std::map<std::string, std::vector<int>> packages;
    TyingIndex tying;
    std::map<std::string, Split> splits;

    std::vector<int> graphs_in(Split s) const;
    std::size_t num_nodes() const;
};

class DuplicateGraphId : public Error {
public:
    using Error::Error;
};

class TooFewPackages : public Error {
public:
    using Error::Error;
};

/// Builds the corpus and its tying index. `package_of[i]` names the package of
/// `graphs[i]`.
Corpus assemble_corpus(std::vector<graph::SigmaGraph> graphs, std::vector<std::string> package_of);

TyingIndex build_tying_index(const std::vector<graph::SigmaGraph>& graphs);

struct SplitRatios {
    double train = 0.8;
    double valid = 0.1;
    double test = 0.1;
};

/// Package-level split. Valid and test each get max(1, round(n * ratio))
/// packages, train the rest; deterministic under `seed`.
std::map<std::string, Split> split_corpus(const Corpus& corpus, SplitRatios ratios, std::uint64_t seed);
std::map<std::string, Split> split_packages(std::vector<std::string> packages, SplitRatios ratios,
                                            std::uint64_t seed);

}  // namespace codegraph::corpus
