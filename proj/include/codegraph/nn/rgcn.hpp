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
#include <string>
#include <vector>

#include "codegraph/embed/embed.hpp"
#include "codegraph/graph/sigma_graph.hpp"
#include "codegraph/nn/modules.hpp"

namespace codegraph::nn {

using RelationAdjacency = std::array<SpMat, graph::kNumEdgeTypes>;

/// Row-normalized in-neighbor adjacency per relation: entry (i, j) is
/// 1/|N_i^r| when j is a distinct r-predecessor of i.
RelationAdjacency relation_adjacency(int num_nodes, const std::vector<graph::SigmaEdge>& edges);

/// Several method graphs merged into one block-diagonal graph.
struct GraphBatch {
    int num_nodes = 0;
    int num_graphs = 0;
    /// Batch-local graph index of every node (virtual nodes included).
    std::vector<int> node_graph;
    /// First node of each graph; graph g spans [offset[g], offset[g+1]).
    std::vector<int> offset;
    std::vector<graph::NodeType> ntype;
    std::vector<graph::SigmaEdge> edges;
    RelationAdjacency adj;
    /// Subword input features; zero rows for strict and virtual nodes.
    Mat x_const;
    std::vector<int> strict_pos;
    std::vector<int> strict_row;
    /// Virtual pooling node per graph, empty when not requested.
    std::vector<int> virtual_node;

    int real_nodes() const { return offset.empty() ? 0 : offset.back(); }
};

/// Graphs must carry inverse edges already when the encoder expects them.
GraphBatch make_batch(const std::vector<const graph::SigmaGraph*>& graphs,
                      const std::vector<const embed::NodeInitFeatures*>& features, bool add_virtual_nodes = false);

struct RgcnConfig {
    int in_dim = 300;
    int hidden = 300;
    int layers = 2;
    double dropout = 0.2;
    bool self_loop = true;
};

/// One layer: phi( sum_r A_r H W_r + H W_self ). Relations whose weight is
/// undefined or whose adjacency is empty contribute nothing.
Tensor rgcn_layer_forward(const Tensor& h, const RelationAdjacency& adj, const std::vector<Tensor>& w_rel,
                          const Tensor* w_self, bool apply_relu);

/// Stacked relational graph convolution with the shared strict-feature
/// embedding table and an optional learned virtual-node input.
class RgcnEncoder {
public:
    RgcnEncoder() = default;
    /// Registers `<prefix>.l<k>.<relation>`, `<prefix>.l<k>.self`,
    /// `<prefix>.global` and `<prefix>.virtual` in `store`.
    RgcnEncoder(const RgcnConfig& config, const Mat& global_init, ParamStore& store, Rng& rng,
                const std::string& prefix = "enc");

    const RgcnConfig& config() const { return config_; }
    int out_dim() const { return config_.layers == 0 ? config_.in_dim : config_.hidden; }

    /// Input rows: subword features plus the global rows of strict nodes and
    /// the virtual-node vector.
    Tensor input(const GraphBatch& batch) const;

    Tensor forward(const GraphBatch& batch, bool train, Rng& rng) const;
    /// Forward from explicit input rows (used for corrupted inputs).
    Tensor forward_from(const Tensor& x, const GraphBatch& batch, bool train, Rng& rng) const;

    const std::string& prefix() const { return prefix_; }

private:
    RgcnConfig config_;
    std::string prefix_;
    std::vector<std::vector<Tensor>> w_rel_;
    std::vector<Tensor> w_self_;
    Tensor global_;
    Tensor virtual_;
};

}  // namespace codegraph::nn
