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
#include <map>
#include <utility>
#include <vector>

#include "codegraph/graph/sigma_graph.hpp"
#include "codegraph/nn/modules.hpp"
#include "codegraph/nn/rgcn.hpp"

namespace codegraph::pretrain {

using Metapath = std::vector<graph::EdgeType>;

class EmptyMetapathSet : public Error {
public:
    using Error::Error;
};

class MissingDiagonal : public Error {
public:
    using Error::Error;
};

/// [definition, receiver], [parameter, inv_definition], [dep, dep],
/// [condition, inv_dep], [receiver, inv_receiver].
std::vector<Metapath> default_metapaths();

struct MrwConfig {
    std::vector<Metapath> metapaths = default_metapaths();
    int walks_per_node = 2;
    int negatives = 5;
};

struct Walk {
    std::vector<int> nodes;
    int metapath = 0;
};

/// For every metapath and every node with an outgoing edge of the first
/// type, `walks_per_node` walks of at most metapath-length + 1 nodes. Each
/// step moves to a uniform distinct successor under the required type; a
/// walk that dead-ends is kept when it has at least two nodes.
std::vector<Walk> sample_metapath_walks(const graph::SigmaGraph& g, const MrwConfig& config, std::uint64_t seed);

/// Same, on the edges of a batch graph.
std::vector<Walk> sample_metapath_walks(int num_nodes, const std::vector<graph::SigmaEdge>& edges,
                                        const MrwConfig& config, Rng& rng);

struct NodePair {
    int u = 0;
    int v = 0;
    double y = 1.0;
};

/// All unordered pairs of distinct nodes inside each walk (label +1).
std::vector<NodePair> walk_pairs(const std::vector<Walk>& walks);

/// For each positive pair, `negatives` pairs with one endpoint (chosen at
/// random) replaced by a uniform node of the same type; draws that hit
/// either original endpoint are redrawn. Types with no alternative node
/// yield no negatives.
std::vector<NodePair> sample_negatives(const std::vector<NodePair>& positives,
                                       const std::vector<graph::NodeType>& ntype, int negatives, Rng& rng);

using TypePair = std::pair<graph::NodeType, graph::NodeType>;
using DiagonalMap = std::map<TypePair, nn::Tensor>;

/// One 1 x d diagonal per ordered node-type pair, registered as
/// `<prefix>.<t>.<t'>`, initialized to ones.
DiagonalMap make_diagonals(nn::ParamStore& store, int dim, const std::string& prefix = "mrw");

/// sum over pairs of softplus(-y * sum_j h_u[j] w[j] h_v[j]) with w the
/// diagonal of (type(u), type(v)).
nn::Tensor mrw_loss(const std::vector<NodePair>& pairs, const nn::Tensor& h,
                    const std::vector<graph::NodeType>& ntype, const DiagonalMap& diag);

/// Negated information objective: sum_v softplus(-h_v W s_t) + softplus(h~_v W s_t)
/// with s_t the mean clean embedding of type t. Only the first
/// `ntype.size()` rows take part.
nn::Tensor him_loss(const nn::Tensor& h, const nn::Tensor& h_corrupt, const nn::Tensor& w,
                    const std::vector<graph::NodeType>& ntype);

/// Raw per-node motif participation counts. Classes, in order: 3-path,
/// triangle, 4-path, 3-star, 4-cycle, tailed triangle, diamond, 4-clique.
inline constexpr int kNumMotifs = 8;
using MotifCounts = std::array<double, kNumMotifs>;

/// Counts for every node of the simple undirected graph underlying `g`
/// (directions, types, self-loops and parallel edges dropped).
std::vector<MotifCounts> count_motifs_all(int num_nodes, const std::vector<graph::SigmaEdge>& edges);
MotifCounts count_motifs(const graph::SigmaGraph& g, int v);

/// log(1 + count) per class; one row per node.
nn::Mat motif_targets(const std::vector<MotifCounts>& counts);

/// sum_v || m_v - f(h_v) ||^2
nn::Tensor mt_loss(const nn::Tensor& h, const nn::Mat& targets, const nn::Mlp& f);

/// sum over groups of mean_{v in group} || h_v - g_k ||^2, g_k the group
/// mean. Groups with fewer than two members are ignored.
nn::Tensor nt_loss(const nn::Tensor& h, const std::vector<std::vector<int>>& groups, bool stop_center_gradient = false);

struct LossWeights {
    std::array<double, 4> omega = {1.0, 1.0, 1.0, 1.0};
    /// Throws ConfigError when a weight is negative or all are zero.
    void validate() const;
};

nn::Tensor combined_loss(const std::array<nn::Tensor, 4>& losses, const LossWeights& weights);

}  // namespace codegraph::pretrain
