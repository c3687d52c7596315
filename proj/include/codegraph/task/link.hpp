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
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "codegraph/corpus/corpus.hpp"
#include "codegraph/nn/checkpoint.hpp"
#include "codegraph/nn/modules.hpp"
#include "codegraph/pretrain/pretrain.hpp"

namespace codegraph::task {

class NoTestEdges : public Error {
public:
    using Error::Error;
};

enum class ScorerKind { DistMult, Mlp };
std::string_view to_string(ScorerKind k);
ScorerKind parse_scorer(std::string_view s);

/// sum_j h_u[j] r[j] h_v[j]
double distmult_score(const Eigen::VectorXd& h_u, const Eigen::VectorXd& r, const Eigen::VectorXd& h_v);

/// DistMult keeps one d-vector per edge type ("<prefix>.rel.<type>");
/// the MLP scorer maps [h_u, h_v] through two layers to one logit.
class LinkScorer {
public:
    LinkScorer() = default;
    LinkScorer(ScorerKind kind, int dim, int hidden, nn::ParamStore& store, Rng& rng,
               const std::string& prefix = "link");
    static LinkScorer attach(ScorerKind kind, const nn::ParamStore& store, const std::string& prefix = "link");

    ScorerKind kind() const { return kind_; }
    /// Unbounded scores, one row per (src[i], rel[i], dst[i]).
    nn::Tensor logits(const nn::Tensor& h, const std::vector<int>& src, const std::vector<graph::EdgeType>& rel,
                      const std::vector<int>& dst) const;
    /// Ranking scores: raw for DistMult, the logistic of the logit for MLP.
    nn::Tensor score(const nn::Tensor& h, const std::vector<int>& src, const std::vector<graph::EdgeType>& rel,
                     const std::vector<int>& dst) const;

private:
    ScorerKind kind_ = ScorerKind::DistMult;
    std::vector<nn::Tensor> rel_;
    nn::Mlp mlp_;
};

/// A held-out edge and the nodes allowed as corrupted destinations.
struct LinkQuery {
    int src = 0;
    graph::EdgeType etype = graph::EdgeType::Dep;
    int dst = 0;
    std::vector<int> candidates;
};

using ScoreFn = std::function<std::vector<double>(const std::vector<int>& src, const std::vector<graph::EdgeType>& rel,
                                                  const std::vector<int>& dst)>;

struct ScoreStats {
    double mean = 0.0;
    double stddev = 0.0;
    long n = 0;
};
ScoreStats score_stats(const std::vector<double>& xs);

struct WelchResult {
    double t = 0.0;
    double df = 0.0;
    /// Two-sided.
    double p = 1.0;
};
WelchResult welch_test(const ScoreStats& a, const ScoreStats& b);

/// 1 + #(negatives above the positive) + #(ties) / 2.
double mid_rank(double positive, const std::vector<double>& negatives);

struct LinkMetrics {
    long queries = 0;
    double mrr = 0.0;
    double hit1 = 0.0, hit3 = 0.0, hit10 = 0.0;
    ScoreStats pos, neg;
    WelchResult welch;
};

/// For every query, `negatives` destinations drawn uniformly from its
/// candidates, without replacement when there are enough of them; queries
/// without candidates rank first.
LinkMetrics link_eval(const std::vector<LinkQuery>& queries, const ScoreFn& score, int negatives = 200,
                      std::uint64_t seed = 0);
LinkMetrics link_eval(const std::vector<LinkQuery>& queries, const LinkScorer& scorer, const nn::Tensor& h,
                      int negatives = 200, std::uint64_t seed = 0);

/// Per graph, round(ratio * |E|) edges (at least one) chosen by a seeded
/// hash of (method id, edge) so that graphs of either flavor built from the
/// same method lose the same edges. Only edges of types present in sigma0
/// graphs are eligible.
std::vector<std::vector<graph::SigmaEdge>> hold_out_edges(const std::vector<graph::SigmaGraph>& graphs, double ratio,
                                                          std::uint64_t seed);

/// `g` without the held-out edges.
graph::SigmaGraph without_edges(const graph::SigmaGraph& g, const std::vector<graph::SigmaEdge>& held_out);

struct LinkConfig {
    ScorerKind scorer = ScorerKind::Mlp;
    int epochs = 50;
    double lr = 1e-2;
    double l2 = 1e-4;
    int mlp_hidden = 64;
    int train_negatives = 1;
    int eval_negatives = 200;
    double held_out_ratio = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct LinkModel {
    ScorerKind kind = ScorerKind::Mlp;
    std::unique_ptr<nn::ParamStore> store = std::make_unique<nn::ParamStore>();
    LinkScorer scorer;
};

nn::Checkpoint link_model_checkpoint(const LinkModel& model);
LinkModel link_model_from_checkpoint(const nn::Checkpoint& ckpt);

/// Frozen node embeddings of several graphs stacked row-wise, computed on
/// the graphs with their held-out edges removed. Edges and queries use
/// stacked row ids. Corrupted destinations range over every node of the
/// training graphs (training) or of the test graphs (queries).
struct LinkData {
    nn::Mat h;
    /// Row range [first, second) of each graph.
    std::vector<std::pair<int, int>> range;
    std::vector<graph::SigmaEdge> train_edges;
    /// Rows of the training graphs.
    std::vector<int> train_rows;
    /// Every true edge, for rejecting sampled negatives.
    std::set<std::tuple<int, int, int>> true_edges;
    std::vector<LinkQuery> queries;
};

/// `train_ids` contribute training edges and `test_ids` contribute queries.
LinkData prepare_link_data(const corpus::Corpus& corpus, const pretrain::EncoderState& state,
                           const std::vector<int>& train_ids, const std::vector<int>& test_ids,
                           double held_out_ratio, std::uint64_t seed);

struct LinkResult {
    LinkModel model;
    LinkMetrics metrics;
    std::vector<double> epoch_loss;
};

/// Trains a scorer on frozen embeddings and evaluates it with link_eval.
LinkResult finetune_link(const LinkData& data, const LinkConfig& config);

/// Training split trains, test split evaluates (all graphs for both when the
/// corpus has no split).
LinkResult finetune_link(const corpus::Corpus& corpus, const pretrain::EncoderState& state, const LinkConfig& config);

LinkMetrics evaluate_link(const LinkData& data, const LinkModel& model, int negatives, std::uint64_t seed);

/// The evaluation seed finetune_link derives from its config seed.
std::uint64_t link_eval_seed(std::uint64_t config_seed);

}  // namespace codegraph::task
