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

#include "codegraph/pretrain/signals.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace codegraph::pretrain {

using graph::EdgeType;
using graph::NodeType;
using nn::Mat;
using nn::Tensor;

std::vector<Metapath> default_metapaths() {
    return {{EdgeType::Definition, EdgeType::Receiver},
            {EdgeType::Parameter, EdgeType::InvDefinition},
            {EdgeType::Dep, EdgeType::Dep},
            {EdgeType::Condition, EdgeType::InvDep},
            {EdgeType::Receiver, EdgeType::InvReceiver}};
}

std::vector<Walk> sample_metapath_walks(int num_nodes, const std::vector<graph::SigmaEdge>& edges,
                                        const MrwConfig& config, Rng& rng) {
    if (config.metapaths.empty()) throw EmptyMetapathSet("no metapaths configured");
    // succ[r][u] = sorted distinct successors of u under relation r.
    std::vector<std::vector<std::vector<int>>> succ(graph::kNumEdgeTypes);
    std::vector<char> used(graph::kNumEdgeTypes, 0);
    for (const auto& mp : config.metapaths) {
        if (mp.empty()) throw EmptyMetapathSet("empty metapath");
        for (EdgeType t : mp) used[graph::index_of(t)] = 1;
    }
    for (int r = 0; r < graph::kNumEdgeTypes; ++r) {
        if (used[r]) succ[r].resize(static_cast<std::size_t>(num_nodes));
    }
    for (const auto& e : edges) {
        const int r = graph::index_of(e.etype);
        if (used[r]) succ[r][e.src].push_back(e.dst);
    }
    for (auto& per_rel : succ) {
        for (auto& s : per_rel) {
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
        }
    }
    std::vector<Walk> walks;
    for (std::size_t m = 0; m < config.metapaths.size(); ++m) {
        const Metapath& mp = config.metapaths[m];
        const auto& first = succ[graph::index_of(mp[0])];
        for (int start = 0; start < num_nodes; ++start) {
            if (first[start].empty()) continue;
            for (int k = 0; k < config.walks_per_node; ++k) {
                Walk w;
                w.metapath = static_cast<int>(m);
                w.nodes.push_back(start);
                int cur = start;
                for (EdgeType t : mp) {
                    const auto& next = succ[graph::index_of(t)][cur];
                    if (next.empty()) break;
                    cur = next[rng.uniform_index(next.size())];
                    w.nodes.push_back(cur);
                }
                if (w.nodes.size() >= 2) walks.push_back(std::move(w));
            }
        }
    }
    return walks;
}

std::vector<Walk> sample_metapath_walks(const graph::SigmaGraph& g, const MrwConfig& config, std::uint64_t seed) {
    Rng rng(seed);
    return sample_metapath_walks(g.num_nodes(), g.edges, config, rng);
}

std::vector<NodePair> walk_pairs(const std::vector<Walk>& walks) {
    std::vector<NodePair> out;
    for (const auto& w : walks) {
        for (std::size_t i = 0; i < w.nodes.size(); ++i) {
            for (std::size_t j = i + 1; j < w.nodes.size(); ++j) {
                if (w.nodes[i] != w.nodes[j]) out.push_back({w.nodes[i], w.nodes[j], 1.0});
            }
        }
    }
    return out;
}

std::vector<NodePair> sample_negatives(const std::vector<NodePair>& positives, const std::vector<NodeType>& ntype,
                                       int negatives, Rng& rng) {
    std::array<std::vector<int>, graph::kNumNodeTypes> by_type;
    for (std::size_t i = 0; i < ntype.size(); ++i) by_type[graph::index_of(ntype[i])].push_back(static_cast<int>(i));
    std::vector<NodePair> out;
    for (const auto& p : positives) {
        for (int k = 0; k < negatives; ++k) {
            const bool replace_v = rng.bernoulli(0.5);
            const int keep = replace_v ? p.u : p.v;
            const int old = replace_v ? p.v : p.u;
            const auto& pool = by_type[graph::index_of(ntype[old])];
            std::size_t alternatives = pool.size();
            alternatives -= std::count(pool.begin(), pool.end(), old);
            alternatives -= keep != old && ntype[keep] == ntype[old] ? 1 : 0;
            if (alternatives == 0) continue;
            int pick;
            do {
                pick = pool[rng.uniform_index(pool.size())];
            } while (pick == old || pick == keep);
            out.push_back(replace_v ? NodePair{p.u, pick, -1.0} : NodePair{pick, p.v, -1.0});
        }
    }
    return out;
}

DiagonalMap make_diagonals(nn::ParamStore& store, int dim, const std::string& prefix) {
    DiagonalMap m;
    for (int a = 0; a < graph::kNumNodeTypes; ++a) {
        for (int b = 0; b < graph::kNumNodeTypes; ++b) {
            const auto ta = static_cast<NodeType>(a), tb = static_cast<NodeType>(b);
            const std::string name = prefix + "." + std::string(graph::to_string(ta)) + "." +
                                     std::string(graph::to_string(tb));
            m.emplace(TypePair{ta, tb}, store.add(name, Mat::Ones(1, dim)));
        }
    }
    return m;
}

Tensor mrw_loss(const std::vector<NodePair>& pairs, const Tensor& h, const std::vector<NodeType>& ntype,
                const DiagonalMap& diag) {
    std::map<TypePair, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        groups[{ntype.at(pairs[i].u), ntype.at(pairs[i].v)}].push_back(i);
    }
    Tensor total = Tensor::constant(Mat::Zero(1, 1));
    for (const auto& [tp, idx] : groups) {
        auto it = diag.find(tp);
        if (it == diag.end()) {
            throw MissingDiagonal("no diagonal for node types (" + std::string(graph::to_string(tp.first)) + ", " +
                                  std::string(graph::to_string(tp.second)) + ")");
        }
        std::vector<int> us, vs;
        Mat neg_y(static_cast<Eigen::Index>(idx.size()), 1);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            us.push_back(pairs[idx[k]].u);
            vs.push_back(pairs[idx[k]].v);
            neg_y(static_cast<Eigen::Index>(k), 0) = -pairs[idx[k]].y;
        }
        Tensor score = nn::row_dot(nn::mul_rowvec(nn::gather_rows(h, us), it->second), nn::gather_rows(h, vs));
        total = nn::add(total, nn::sum(nn::softplus(nn::mul(score, Tensor::constant(std::move(neg_y))))));
    }
    return total;
}

Tensor him_loss(const Tensor& h, const Tensor& h_corrupt, const Tensor& w, const std::vector<NodeType>& ntype) {
    const auto n = static_cast<Eigen::Index>(ntype.size());
    if (h.rows() < n || h_corrupt.rows() < n || h.cols() != h_corrupt.cols()) {
        throw nn::ShapeMismatch("him_loss: embeddings do not cover the typed nodes");
    }
    if (n == 0) return Tensor::constant(Mat::Zero(1, 1));
    std::vector<int> rows(static_cast<std::size_t>(n)), types(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        rows[i] = static_cast<int>(i);
        types[i] = graph::index_of(ntype[i]);
    }
    Tensor hc = h.rows() == n ? h : nn::gather_rows(h, rows);
    Tensor hn = h_corrupt.rows() == n ? h_corrupt : nn::gather_rows(h_corrupt, rows);
    Tensor s = nn::gather_rows(nn::segment_mean(hc, types, graph::kNumNodeTypes), types);
    Tensor pos = nn::row_dot(nn::matmul(hc, w), s);
    Tensor neg = nn::row_dot(nn::matmul(hn, w), s);
    return nn::add(nn::sum(nn::softplus(nn::scale(pos, -1.0))), nn::sum(nn::softplus(neg)));
}

namespace {

int classify(const std::vector<int>& nodes, const std::vector<std::vector<char>>& adj) {
    const std::size_t k = nodes.size();
    int edges = 0;
    int max_deg = 0;
    for (std::size_t i = 0; i < k; ++i) {
        int deg = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (i != j && adj[nodes[i]][nodes[j]]) ++deg;
        }
        edges += deg;
        max_deg = std::max(max_deg, deg);
    }
    edges /= 2;
    if (k == 3) return edges == 2 ? 0 : 1;
    switch (edges) {
        case 3: return max_deg == 3 ? 3 : 2;
        case 4: return max_deg == 2 ? 4 : 5;
        case 5: return 6;
        default: return 7;
    }
}

}  // namespace

std::vector<MotifCounts> count_motifs_all(int num_nodes, const std::vector<graph::SigmaEdge>& edges) {
    const auto n = static_cast<std::size_t>(num_nodes);
    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (const auto& e : edges) {
        if (e.src == e.dst) continue;
        adj[e.src][e.dst] = adj[e.dst][e.src] = 1;
    }
    std::vector<std::vector<int>> nbr(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (adj[i][j]) nbr[i].push_back(static_cast<int>(j));
        }
    }
    std::vector<MotifCounts> counts(n, MotifCounts{});

    // ESU enumeration: every connected induced subgraph of size 3 or 4 is
    // visited exactly once, rooted at its smallest vertex.
    std::vector<int> sub;
    std::vector<char> in_sub(n, 0), near_sub(n, 0);
    std::function<void(std::vector<int>, int)> extend = [&](std::vector<int> ext, int root) {
        if (sub.size() >= 3) {
            const int cls = classify(sub, adj);
            for (int v : sub) counts[v][cls] += 1.0;
        }
        if (sub.size() == 4) return;
        while (!ext.empty()) {
            const int w = ext.back();
            ext.pop_back();
            std::vector<int> next = ext;
            for (int u : nbr[w]) {
                if (u > root && !in_sub[u] && !near_sub[u]) next.push_back(u);
            }
            // Mark the closed neighborhood of the enlarged subgraph.
            std::vector<int> marked;
            for (int u : nbr[w]) {
                if (!near_sub[u]) {
                    near_sub[u] = 1;
                    marked.push_back(u);
                }
            }
            sub.push_back(w);
            in_sub[w] = 1;
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            extend(next, root);
            in_sub[w] = 0;
            sub.pop_back();
            for (int u : marked) near_sub[u] = 0;
        }
    };
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<int> ext;
        for (int u : nbr[v]) {
            if (u > static_cast<int>(v)) ext.push_back(u);
        }
        sub = {static_cast<int>(v)};
        in_sub[v] = 1;
        std::vector<int> marked;
        for (int u : nbr[v]) {
            near_sub[u] = 1;
            marked.push_back(u);
        }
        extend(ext, static_cast<int>(v));
        in_sub[v] = 0;
        for (int u : marked) near_sub[u] = 0;
    }
    return counts;
}

MotifCounts count_motifs(const graph::SigmaGraph& g, int v) {
    if (v < 0 || v >= g.num_nodes()) throw InternalError("count_motifs: node out of range");
    return count_motifs_all(g.num_nodes(), g.edges)[v];
}

Mat motif_targets(const std::vector<MotifCounts>& counts) {
    Mat m(static_cast<Eigen::Index>(counts.size()), kNumMotifs);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        for (int k = 0; k < kNumMotifs; ++k) m(static_cast<Eigen::Index>(i), k) = std::log1p(counts[i][k]);
    }
    return m;
}

Tensor mt_loss(const Tensor& h, const Mat& targets, const nn::Mlp& f) {
    if (targets.rows() > h.rows() || targets.cols() != f.out_dim()) {
        throw nn::ShapeMismatch("mt_loss: targets do not match embeddings or head");
    }
    Tensor rows = h;
    if (targets.rows() != h.rows()) {
        std::vector<int> idx(static_cast<std::size_t>(targets.rows()));
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
        rows = nn::gather_rows(h, idx);
    }
    return nn::sum(nn::row_sqnorm(nn::sub(Tensor::constant(targets), f.forward(rows))));
}

Tensor nt_loss(const Tensor& h, const std::vector<std::vector<int>>& groups, bool stop_center_gradient) {
    std::vector<int> members, gid;
    std::vector<double> weight;
    int k = 0;
    for (const auto& g : groups) {
        if (g.size() < 2) continue;
        for (int v : g) {
            members.push_back(v);
            gid.push_back(k);
            weight.push_back(1.0 / static_cast<double>(g.size()));
        }
        ++k;
    }
    if (k == 0) return Tensor::constant(Mat::Zero(1, 1));
    Tensor hm = nn::gather_rows(h, members);
    Tensor centers = nn::segment_mean(hm, gid, k);
    if (stop_center_gradient) centers = nn::detach(centers);
    Tensor diff = nn::sub(hm, nn::gather_rows(centers, gid));
    Mat w = Eigen::Map<Mat>(weight.data(), static_cast<Eigen::Index>(weight.size()), 1);
    return nn::sum(nn::mul(nn::row_sqnorm(diff), Tensor::constant(w)));
}

void LossWeights::validate() const {
    bool any = false;
    for (double w : omega) {
        if (w < 0 || !std::isfinite(w)) throw ConfigError("loss weights must be finite and non-negative");
        any = any || w > 0;
    }
    if (!any) throw ConfigError("at least one loss weight must be positive");
}

Tensor combined_loss(const std::array<Tensor, 4>& losses, const LossWeights& weights) {
    Tensor total = Tensor::constant(Mat::Zero(1, 1));
    for (int i = 0; i < 4; ++i) {
        if (weights.omega[i] == 0.0 || !losses[i].defined()) continue;
        total = nn::add(total, nn::scale(losses[i], weights.omega[i]));
    }
    return total;
}

}  // namespace codegraph::pretrain
