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

#include "codegraph/nn/rgcn.hpp"

#include <algorithm>
#include <set>

namespace codegraph::nn {

using graph::EdgeType;

RelationAdjacency relation_adjacency(int num_nodes, const std::vector<graph::SigmaEdge>& edges) {
    std::array<std::vector<std::pair<int, int>>, graph::kNumEdgeTypes> pairs;
    for (const auto& e : edges) pairs[graph::index_of(e.etype)].push_back({e.dst, e.src});
    RelationAdjacency adj;
    for (int r = 0; r < graph::kNumEdgeTypes; ++r) {
        auto& p = pairs[r];
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
        std::vector<int> deg(static_cast<std::size_t>(num_nodes), 0);
        for (auto [i, j] : p) ++deg[i];
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(p.size());
        for (auto [i, j] : p) trips.emplace_back(i, j, 1.0 / deg[i]);
        adj[r].resize(num_nodes, num_nodes);
        adj[r].setFromTriplets(trips.begin(), trips.end());
    }
    return adj;
}

GraphBatch make_batch(const std::vector<const graph::SigmaGraph*>& graphs,
                      const std::vector<const embed::NodeInitFeatures*>& features, bool add_virtual_nodes) {
    if (graphs.size() != features.size()) throw ShapeMismatch("make_batch: one feature set per graph required");
    GraphBatch b;
    b.num_graphs = static_cast<int>(graphs.size());
    int total = 0;
    b.offset.push_back(0);
    for (const auto* g : graphs) {
        total += g->num_nodes();
        b.offset.push_back(total);
    }
    const int dim = features.empty() ? 0 : static_cast<int>(features[0]->x.cols());
    b.num_nodes = total + (add_virtual_nodes ? b.num_graphs : 0);
    b.x_const = Mat::Zero(b.num_nodes, dim);
    b.node_graph.resize(static_cast<std::size_t>(b.num_nodes));
    b.ntype.resize(static_cast<std::size_t>(b.num_nodes), graph::NodeType::Data);
    for (int gi = 0; gi < b.num_graphs; ++gi) {
        const auto& g = *graphs[gi];
        const auto& f = *features[gi];
        if (f.x.rows() != g.num_nodes() || f.x.cols() != dim) {
            throw ShapeMismatch("make_batch: features of graph '" + g.method_id + "' do not match its nodes");
        }
        const int base = b.offset[gi];
        for (int v = 0; v < g.num_nodes(); ++v) {
            b.node_graph[base + v] = gi;
            b.ntype[base + v] = g.nodes[v].ntype;
            if (f.global_row[v] >= 0) {
                b.strict_pos.push_back(base + v);
                b.strict_row.push_back(f.global_row[v]);
            } else {
                b.x_const.row(base + v) = f.x.row(v);
            }
        }
        for (const auto& e : g.edges) b.edges.push_back({base + e.src, e.etype, base + e.dst});
    }
    if (add_virtual_nodes) {
        for (int gi = 0; gi < b.num_graphs; ++gi) {
            const int vn = total + gi;
            b.virtual_node.push_back(vn);
            b.node_graph[vn] = gi;
            for (int v = b.offset[gi]; v < b.offset[gi + 1]; ++v) b.edges.push_back({v, EdgeType::Virtual, vn});
        }
    }
    b.adj = relation_adjacency(b.num_nodes, b.edges);
    return b;
}

Tensor rgcn_layer_forward(const Tensor& h, const RelationAdjacency& adj, const std::vector<Tensor>& w_rel,
                          const Tensor* w_self, bool apply_relu) {
    Tensor out;
    auto accumulate = [&](const Tensor& t) { out = out.defined() ? add(out, t) : t; };
    for (std::size_t r = 0; r < w_rel.size() && r < adj.size(); ++r) {
        if (!w_rel[r].defined() || adj[r].nonZeros() == 0) continue;
        if (adj[r].rows() != h.rows()) throw ShapeMismatch("rgcn layer: adjacency does not match node count");
        if (w_rel[r].rows() != h.cols()) throw ShapeMismatch("rgcn layer: weight rows do not match input width");
        accumulate(matmul(spmm(adj[r], h), w_rel[r]));
    }
    if (w_self && w_self->defined()) {
        if (w_self->rows() != h.cols()) throw ShapeMismatch("rgcn layer: self weight does not match input width");
        accumulate(matmul(h, *w_self));
    }
    if (!out.defined()) {
        Eigen::Index cols = 0;
        for (const auto& w : w_rel) {
            if (w.defined()) cols = w.cols();
        }
        if (w_self && w_self->defined()) cols = w_self->cols();
        out = Tensor::constant(Mat::Zero(h.rows(), cols));
    }
    return apply_relu ? relu(out) : out;
}

RgcnEncoder::RgcnEncoder(const RgcnConfig& config, const Mat& global_init, ParamStore& store, Rng& rng,
                         const std::string& prefix)
    : config_(config), prefix_(prefix) {
    if (config.layers < 0 || config.in_dim <= 0 || config.hidden <= 0) throw ConfigError("bad encoder shape");
    if (global_init.cols() != config.in_dim) throw ShapeMismatch("global embedding width differs from input width");
    int in = config.in_dim;
    for (int l = 0; l < config.layers; ++l) {
        std::vector<Tensor> ws;
        for (int r = 0; r < graph::kNumEdgeTypes; ++r) {
            const std::string name = prefix + ".l" + std::to_string(l) + "." +
                                     std::string(graph::to_string(static_cast<EdgeType>(r)));
            ws.push_back(store.add(name, glorot(in, config.hidden, rng)));
        }
        w_rel_.push_back(std::move(ws));
        if (config.self_loop) {
            w_self_.push_back(store.add(prefix + ".l" + std::to_string(l) + ".self", glorot(in, config.hidden, rng)));
        } else {
            w_self_.emplace_back();
        }
        in = config.hidden;
    }
    global_ = store.add(prefix + ".global", global_init);
    Mat v(1, config.in_dim);
    const double a = 1.0 / config.in_dim;
    for (Eigen::Index j = 0; j < v.cols(); ++j) v(0, j) = rng.uniform(-a, a);
    virtual_ = store.add(prefix + ".virtual", v);
}

Tensor RgcnEncoder::input(const GraphBatch& batch) const {
    if (batch.x_const.cols() != config_.in_dim) {
        throw ShapeMismatch("encoder expects " + std::to_string(config_.in_dim) + " input columns, batch has " +
                            std::to_string(batch.x_const.cols()));
    }
    Tensor x = Tensor::constant(batch.x_const);
    if (!batch.strict_pos.empty()) {
        x = add(x, scatter_add_rows(gather_rows(global_, batch.strict_row), batch.strict_pos, batch.num_nodes));
    }
    if (!batch.virtual_node.empty()) {
        std::vector<int> zeros(batch.virtual_node.size(), 0);
        x = add(x, scatter_add_rows(gather_rows(virtual_, zeros), batch.virtual_node, batch.num_nodes));
    }
    return x;
}

Tensor RgcnEncoder::forward(const GraphBatch& batch, bool train, Rng& rng) const {
    return forward_from(input(batch), batch, train, rng);
}

Tensor RgcnEncoder::forward_from(const Tensor& x, const GraphBatch& batch, bool train, Rng& rng) const {
    if (x.rows() != batch.num_nodes || x.cols() != config_.in_dim) {
        throw ShapeMismatch("encoder input does not match the batch");
    }
    Tensor h = x;
    for (int l = 0; l < config_.layers; ++l) {
        const bool last = l + 1 == config_.layers;
        const Tensor* self = w_self_[l].defined() ? &w_self_[l] : nullptr;
        h = rgcn_layer_forward(h, batch.adj, w_rel_[l], self, !last);
        if (!last) h = dropout(h, config_.dropout, train, rng);
    }
    return h;
}

}  // namespace codegraph::nn
