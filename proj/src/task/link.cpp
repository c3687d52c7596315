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

#include "codegraph/task/link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/distributions/students_t.hpp>

#include "codegraph/embed/embed.hpp"

namespace codegraph::task {

using graph::EdgeType;
using nn::Mat;
using nn::Tensor;

std::string_view to_string(ScorerKind k) { return k == ScorerKind::DistMult ? "distmult" : "mlp"; }

ScorerKind parse_scorer(std::string_view s) {
    if (s == "distmult") return ScorerKind::DistMult;
    if (s == "mlp") return ScorerKind::Mlp;
    throw ConfigError("unknown scorer '" + std::string(s) + "' (expected distmult or mlp)");
}

double distmult_score(const Eigen::VectorXd& h_u, const Eigen::VectorXd& r, const Eigen::VectorXd& h_v) {
    if (h_u.size() != r.size() || h_v.size() != r.size()) throw nn::ShapeMismatch("distmult: dimensions differ");
    return (h_u.array() * r.array() * h_v.array()).sum();
}

LinkScorer::LinkScorer(ScorerKind kind, int dim, int hidden, nn::ParamStore& store, Rng& rng,
                       const std::string& prefix)
    : kind_(kind) {
    if (kind == ScorerKind::DistMult) {
        rel_.resize(graph::kNumEdgeTypes);
        for (int r = 0; r < graph::kNumEdgeTypes; ++r) {
            const auto t = static_cast<EdgeType>(r);
            if (t == EdgeType::Virtual) continue;
            rel_[r] = store.add(prefix + ".rel." + std::string(graph::to_string(t)), nn::glorot(1, dim, rng));
        }
    } else {
        mlp_ = nn::Mlp(store, prefix + ".mlp", 2 * dim, hidden, 1, rng);
    }
}

LinkScorer LinkScorer::attach(ScorerKind kind, const nn::ParamStore& store, const std::string& prefix) {
    LinkScorer s;
    s.kind_ = kind;
    if (kind == ScorerKind::DistMult) {
        s.rel_.resize(graph::kNumEdgeTypes);
        for (int r = 0; r < graph::kNumEdgeTypes; ++r) {
            const auto t = static_cast<EdgeType>(r);
            if (t != EdgeType::Virtual) s.rel_[r] = store.get(prefix + ".rel." + std::string(graph::to_string(t)));
        }
    } else {
        s.mlp_ = nn::Mlp::attach(store, prefix + ".mlp");
    }
    return s;
}

Tensor LinkScorer::logits(const Tensor& h, const std::vector<int>& src, const std::vector<EdgeType>& rel,
                          const std::vector<int>& dst) const {
    if (src.size() != dst.size() || rel.size() != src.size()) throw nn::ShapeMismatch("link scorer: index lengths differ");
    const Tensor hu = nn::gather_rows(h, src);
    const Tensor hv = nn::gather_rows(h, dst);
    if (kind_ == ScorerKind::Mlp) return mlp_.forward(nn::concat_cols(hu, hv));

    // Group rows by relation so each relation vector is broadcast once.
    std::vector<std::vector<int>> by_rel(graph::kNumEdgeTypes);
    for (std::size_t i = 0; i < rel.size(); ++i) {
        const int r = graph::index_of(rel[i]);
        if (!rel_[r].defined()) throw ConfigError("no relation vector for edge type " + std::string(graph::to_string(rel[i])));
        by_rel[r].push_back(static_cast<int>(i));
    }
    Tensor out;
    for (int r = 0; r < graph::kNumEdgeTypes; ++r) {
        if (by_rel[r].empty()) continue;
        const Tensor part = nn::row_dot(nn::mul_rowvec(nn::gather_rows(hu, by_rel[r]), rel_[r]),
                                        nn::gather_rows(hv, by_rel[r]));
        const Tensor placed = nn::scatter_add_rows(part, by_rel[r], static_cast<Eigen::Index>(src.size()));
        out = out.defined() ? nn::add(out, placed) : placed;
    }
    return out.defined() ? out : Tensor::constant(Mat::Zero(0, 1));
}

Tensor LinkScorer::score(const Tensor& h, const std::vector<int>& src, const std::vector<EdgeType>& rel,
                         const std::vector<int>& dst) const {
    const Tensor l = logits(h, src, rel, dst);
    return kind_ == ScorerKind::Mlp ? nn::sigmoid(l) : l;
}

ScoreStats score_stats(const std::vector<double>& xs) {
    ScoreStats s;
    s.n = static_cast<long>(xs.size());
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double sq = 0.0;
        for (double x : xs) sq += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(sq / static_cast<double>(xs.size() - 1));
    }
    return s;
}

WelchResult welch_test(const ScoreStats& a, const ScoreStats& b) {
    WelchResult w;
    if (a.n < 2 || b.n < 2) return w;
    const double va = a.stddev * a.stddev / static_cast<double>(a.n);
    const double vb = b.stddev * b.stddev / static_cast<double>(b.n);
    const double se = std::sqrt(va + vb);
    if (se == 0.0) {
        if (a.mean != b.mean) {
            w.t = a.mean > b.mean ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
            w.p = 0.0;
        }
        w.df = static_cast<double>(a.n + b.n - 2);
        return w;
    }
    w.t = (a.mean - b.mean) / se;
    w.df = (va + vb) * (va + vb) /
           (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
    boost::math::students_t dist(w.df);
    w.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(w.t)));
    return w;
}

double mid_rank(double positive, const std::vector<double>& negatives) {
    double above = 0.0, ties = 0.0;
    for (double n : negatives) {
        if (n > positive) {
            above += 1.0;
        } else if (n == positive) {
            ties += 1.0;
        }
    }
    return 1.0 + above + ties / 2.0;
}

LinkMetrics link_eval(const std::vector<LinkQuery>& queries, const ScoreFn& score, int negatives, std::uint64_t seed) {
    if (queries.empty()) throw NoTestEdges("no test edges to evaluate");
    if (negatives < 1) throw ConfigError("negatives per edge must be at least 1");
    Rng rng(seed);
    LinkMetrics m;
    std::vector<double> pos_scores, neg_scores;
    for (const auto& q : queries) {
        std::vector<int> src(static_cast<std::size_t>(negatives) + 1, q.src);
        std::vector<EdgeType> rel(src.size(), q.etype);
        std::vector<int> dst(src.size(), q.dst);
        if (q.candidates.size() >= static_cast<std::size_t>(negatives)) {
            std::vector<int> pool = q.candidates;
            for (std::size_t k = 0; k < static_cast<std::size_t>(negatives); ++k) {
                std::swap(pool[k], pool[k + rng.uniform_index(pool.size() - k)]);
                dst[k + 1] = pool[k];
            }
        } else if (!q.candidates.empty()) {
            for (std::size_t k = 1; k < dst.size(); ++k) dst[k] = q.candidates[rng.uniform_index(q.candidates.size())];
        } else {
            dst.resize(1);
            src.resize(1);
            rel.resize(1);
        }
        const std::vector<double> s = score(src, rel, dst);
        if (s.size() != dst.size()) throw nn::ShapeMismatch("score function returned the wrong number of scores");
        const std::vector<double> neg(s.begin() + 1, s.end());
        const double rank = mid_rank(s[0], neg);
        m.mrr += 1.0 / rank;
        m.hit1 += rank <= 1.0 ? 1.0 : 0.0;
        m.hit3 += rank <= 3.0 ? 1.0 : 0.0;
        m.hit10 += rank <= 10.0 ? 1.0 : 0.0;
        pos_scores.push_back(s[0]);
        neg_scores.insert(neg_scores.end(), neg.begin(), neg.end());
    }
    const auto n = static_cast<double>(queries.size());
    m.queries = static_cast<long>(queries.size());
    m.mrr /= n;
    m.hit1 /= n;
    m.hit3 /= n;
    m.hit10 /= n;
    m.pos = score_stats(pos_scores);
    m.neg = score_stats(neg_scores);
    m.welch = welch_test(m.pos, m.neg);
    return m;
}

LinkMetrics link_eval(const std::vector<LinkQuery>& queries, const LinkScorer& scorer, const Tensor& h, int negatives,
                      std::uint64_t seed) {
    const Tensor hc = nn::detach(h);
    return link_eval(
        queries,
        [&](const std::vector<int>& src, const std::vector<EdgeType>& rel, const std::vector<int>& dst) {
            const Mat s = scorer.score(hc, src, rel, dst).value();
            return std::vector<double>(s.data(), s.data() + s.size());
        },
        negatives, seed);
}

std::vector<std::vector<graph::SigmaEdge>> hold_out_edges(const std::vector<graph::SigmaGraph>& graphs, double ratio,
                                                          std::uint64_t seed) {
    if (!(ratio > 0 && ratio < 1)) throw ConfigError("held-out ratio must be in (0, 1)");
    std::vector<std::vector<graph::SigmaEdge>> out(graphs.size());
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const auto& g = graphs[gi];
        const std::uint64_t gkey = mix64(embed::fnv1a(g.method_id) ^ mix64(seed));
        std::vector<std::pair<std::uint64_t, graph::SigmaEdge>> eligible;
        for (const auto& e : g.edges) {
            if (graph::is_sigma1_only(e.etype) || graph::is_inverse(e.etype) || e.etype == EdgeType::Virtual) continue;
            const std::uint64_t k =
                mix64(gkey ^ mix64((static_cast<std::uint64_t>(e.src) << 32) ^ static_cast<std::uint64_t>(e.dst)) ^
                      static_cast<std::uint64_t>(graph::index_of(e.etype)));
            eligible.emplace_back(k, e);
        }
        if (eligible.empty()) continue;
        std::sort(eligible.begin(), eligible.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first < b.first;
            return std::tie(a.second.src, a.second.etype, a.second.dst) <
                   std::tie(b.second.src, b.second.etype, b.second.dst);
        });
        auto k = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(eligible.size())));
        k = std::clamp<std::size_t>(k, 1, eligible.size());
        for (std::size_t i = 0; i < k; ++i) out[gi].push_back(eligible[i].second);
        std::sort(out[gi].begin(), out[gi].end(), [](const auto& a, const auto& b) {
            return std::tie(a.src, a.etype, a.dst) < std::tie(b.src, b.etype, b.dst);
        });
    }
    return out;
}

graph::SigmaGraph without_edges(const graph::SigmaGraph& g, const std::vector<graph::SigmaEdge>& held_out) {
    graph::SigmaGraph out = g;
    out.edges.clear();
    for (const auto& e : g.edges) {
        const bool drop = std::any_of(held_out.begin(), held_out.end(), [&](const graph::SigmaEdge& h) {
            return h == e || (graph::is_inverse(e.etype) && e.etype != EdgeType::Virtual &&
                              h == graph::SigmaEdge{e.dst, graph::inverse_of(e.etype), e.src});
        });
        if (!drop) out.edges.push_back(e);
    }
    return out;
}

void LinkConfig::validate() const {
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (!(lr > 0)) throw ConfigError("lr must be positive");
    if (l2 < 0) throw ConfigError("l2 must be non-negative");
    if (mlp_hidden < 1) throw ConfigError("mlp_hidden must be at least 1");
    if (train_negatives < 1 || eval_negatives < 1) throw ConfigError("negatives must be at least 1");
    if (!(held_out_ratio > 0 && held_out_ratio < 1)) throw ConfigError("held_out_ratio must be in (0, 1)");
}

nn::Checkpoint link_model_checkpoint(const LinkModel& model) {
    nn::Checkpoint c = nn::snapshot(*model.store);
    c.manifest = {{"format", "codegraph-link-head"}, {"scorer", std::string(to_string(model.kind))}};
    return c;
}

LinkModel link_model_from_checkpoint(const nn::Checkpoint& ckpt) {
    auto f = ckpt.manifest.find("format");
    auto k = ckpt.manifest.find("scorer");
    if (f == ckpt.manifest.end() || f->second != "codegraph-link-head" || k == ckpt.manifest.end()) {
        throw nn::CheckpointError("not a link head checkpoint");
    }
    LinkModel m;
    m.kind = parse_scorer(k->second);
    for (const auto& [name, value] : ckpt.tensors) m.store->add(name, value);
    try {
        m.scorer = LinkScorer::attach(m.kind, *m.store);
    } catch (const InternalError& e) {
        throw nn::CheckpointError(std::string("incomplete link head: ") + e.what());
    }
    return m;
}

LinkData prepare_link_data(const corpus::Corpus& corpus, const pretrain::EncoderState& state,
                           const std::vector<int>& train_ids, const std::vector<int>& test_ids,
                           double held_out_ratio, std::uint64_t seed) {
    std::vector<int> ids = train_ids;
    for (int t : test_ids) {
        if (std::find(ids.begin(), ids.end(), t) == ids.end()) ids.push_back(t);
    }
    std::vector<graph::SigmaGraph> originals;
    for (int id : ids) originals.push_back(corpus.graphs.at(static_cast<std::size_t>(id)));
    const auto held = hold_out_edges(originals, held_out_ratio, seed);

    const embed::SubwordEmbedder embedder(state.subword);
    const Mat global = state.store->get(state.encoder.prefix() + ".global").value();
    pretrain::PreparedCorpus reduced;
    reduced.global_init = global;
    const corpus::TyingIndex no_tying;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        reduced.graphs.push_back(pretrain::prepare_graph(without_edges(originals[i], held[i]), embedder, global, no_tying));
    }

    LinkData d;
    int total = 0;
    for (const auto& g : originals) {
        d.range.emplace_back(total, total + g.num_nodes());
        total += g.num_nodes();
    }
    d.h = Mat(total, state.encoder.out_dim());
    Rng unused(0);
    for (std::size_t s = 0; s < ids.size(); s += 32) {
        std::vector<int> chunk;
        for (std::size_t i = s; i < std::min(ids.size(), s + 32); ++i) chunk.push_back(static_cast<int>(i));
        const auto batch = pretrain::make_prepared_batch(reduced, chunk);
        const Mat h = state.encoder.forward(batch, false, unused).value();
        d.h.middleRows(d.range[s].first, batch.real_nodes()) = h.topRows(batch.real_nodes());
    }

    const std::set<int> train_set(train_ids.begin(), train_ids.end()), test_set(test_ids.begin(), test_ids.end());
    std::vector<int> test_rows;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const int base = d.range[i].first;
        for (const auto& e : originals[i].edges) d.true_edges.emplace(base + e.src, graph::index_of(e.etype), base + e.dst);
        for (int v = d.range[i].first; v < d.range[i].second; ++v) {
            if (train_set.count(ids[i])) d.train_rows.push_back(v);
            if (test_set.count(ids[i])) test_rows.push_back(v);
        }
        if (train_set.count(ids[i])) {
            for (const auto& e : originals[i].edges) {
                if (graph::is_sigma1_only(e.etype) || graph::is_inverse(e.etype)) continue;
                if (std::find(held[i].begin(), held[i].end(), e) != held[i].end()) continue;
                d.train_edges.push_back({base + e.src, e.etype, base + e.dst});
            }
        }
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!test_set.count(ids[i])) continue;
        const int base = d.range[i].first;
        for (const auto& e : held[i]) {
            LinkQuery q{base + e.src, e.etype, base + e.dst, {}};
            for (int v : test_rows) {
                if (!d.true_edges.count({q.src, graph::index_of(e.etype), v})) q.candidates.push_back(v);
            }
            d.queries.push_back(std::move(q));
        }
    }
    return d;
}

LinkMetrics evaluate_link(const LinkData& data, const LinkModel& model, int negatives, std::uint64_t seed) {
    return link_eval(data.queries, model.scorer, Tensor::constant(data.h), negatives, seed);
}

std::uint64_t link_eval_seed(std::uint64_t config_seed) { return Rng(config_seed).fork(2).next(); }

LinkResult finetune_link(const LinkData& data, const LinkConfig& config) {
    config.validate();
    if (data.queries.empty()) throw NoTestEdges("no test edges to evaluate");
    Rng master(config.seed);
    LinkResult r;
    r.model.kind = config.scorer;
    Rng init = master.fork(1);
    r.model.scorer = LinkScorer(config.scorer, static_cast<int>(data.h.cols()), config.mlp_hidden, *r.model.store, init);
    nn::AdamConfig ac;
    ac.lr = config.lr;
    ac.weight_decay = config.l2;
    nn::Adam adam(ac);
    const Tensor h = Tensor::constant(data.h);
    constexpr std::size_t kBatch = 256;

    std::vector<std::size_t> order(data.train_edges.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng rng = master.fork(100 + static_cast<std::uint64_t>(epoch));
        rng.shuffle(order);
        double total = 0.0;
        for (std::size_t s = 0; s < order.size(); s += kBatch) {
            std::vector<int> src, dst, nsrc, ndst;
            std::vector<EdgeType> rel, nrel;
            for (std::size_t k = s; k < std::min(order.size(), s + kBatch); ++k) {
                const auto& e = data.train_edges[order[k]];
                src.push_back(e.src);
                rel.push_back(e.etype);
                dst.push_back(e.dst);
                for (int n = 0; n < config.train_negatives; ++n) {
                    // Bounded redraws; a node linked to every row keeps the last draw.
                    int v = e.dst;
                    for (int tries = 0; tries < 32; ++tries) {
                        v = data.train_rows[rng.uniform_index(data.train_rows.size())];
                        if (!data.true_edges.count({e.src, graph::index_of(e.etype), v})) break;
                    }
                    nsrc.push_back(e.src);
                    nrel.push_back(e.etype);
                    ndst.push_back(v);
                }
            }
            const Tensor pos = r.model.scorer.logits(h, src, rel, dst);
            const Tensor neg = r.model.scorer.logits(h, nsrc, nrel, ndst);
            const double n = static_cast<double>(src.size());
            Tensor loss = nn::scale(nn::add(nn::sum(nn::softplus(nn::scale(pos, -1.0))),
                                            nn::scale(nn::sum(nn::softplus(neg)), 1.0 / config.train_negatives)),
                                    1.0 / n);
            if (!std::isfinite(loss.item())) throw pretrain::NonFiniteLoss("non-finite link loss in epoch " +
                                                                           std::to_string(epoch + 1));
            r.model.store->zero_grad();
            loss.backward();
            adam.step(*r.model.store);
            total += loss.item() * n;
        }
        r.epoch_loss.push_back(order.empty() ? 0.0 : total / static_cast<double>(order.size()));
    }
    r.metrics = evaluate_link(data, r.model, config.eval_negatives, link_eval_seed(config.seed));
    return r;
}

LinkResult finetune_link(const corpus::Corpus& corpus, const pretrain::EncoderState& state, const LinkConfig& config) {
    config.validate();
    std::vector<int> train, test;
    if (corpus.splits.empty()) {
        for (int i = 0; i < static_cast<int>(corpus.graphs.size()); ++i) train.push_back(i);
        test = train;
    } else {
        train = corpus.graphs_in(corpus::Split::Train);
        test = corpus.graphs_in(corpus::Split::Test);
    }
    const LinkData data = prepare_link_data(corpus, state, train, test, config.held_out_ratio, config.seed);
    return finetune_link(data, config);
}

}  // namespace codegraph::task
