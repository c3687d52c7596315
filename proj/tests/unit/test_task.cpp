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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "codegraph/corpus/build.hpp"
#include "codegraph/frontend/parser.hpp"
#include "codegraph/graph/builder.hpp"
#include "codegraph/nn/gradcheck.hpp"
#include "codegraph/synth/synth.hpp"
#include "codegraph/task/export.hpp"
#include "codegraph/task/link.hpp"
#include "codegraph/task/name.hpp"

using namespace codegraph;
using namespace codegraph::task;
using graph::EdgeType;
using nn::Mat;
using nn::Tensor;

namespace {

Mat random_mat(Eigen::Index r, Eigen::Index c, Rng& rng, double a = 1.0) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(-a, a);
    }
    return m;
}

corpus::Corpus small_corpus(std::size_t n, graph::Flavor flavor = graph::Flavor::Sigma0, std::uint64_t seed = 7) {
    auto built = corpus::build_graphs(synth::as_source_units(synth::fixture_corpus(n, 3, seed)), flavor);
    REQUIRE(built.issues.empty());
    return corpus::assemble_corpus(std::move(built.graphs), std::move(built.packages));
}

struct Setup {
    corpus::Corpus corpus;
    pretrain::PreparedCorpus prepared;
    pretrain::EncoderState state;
    std::vector<int> ids;

    explicit Setup(corpus::Corpus c, int dim = 8, std::uint64_t seed = 1) : corpus(std::move(c)) {
        embed::SubwordConfig sw;
        sw.dim = dim;
        nn::RgcnConfig rc;
        rc.in_dim = dim;
        rc.hidden = dim;
        rc.dropout = 0.0;
        embed::SubwordEmbedder embedder(sw);
        prepared = pretrain::prepare_corpus(corpus, embedder);
        state = pretrain::make_encoder_state(sw, rc, prepared.global_init, seed);
        ids.resize(corpus.graphs.size());
        std::iota(ids.begin(), ids.end(), 0);
    }
};

// A batch of hand-made graphs with a given number of nodes each.
nn::GraphBatch plain_batch(const std::vector<int>& sizes, bool virt) {
    std::vector<graph::SigmaGraph> gs;
    std::vector<embed::NodeInitFeatures> fs;
    for (int n : sizes) {
        graph::SigmaGraph g;
        for (int v = 0; v < n; ++v) g.nodes.push_back({v, graph::NodeType::Data, "x", {}, {}});
        for (int v = 1; v < n; ++v) g.edges.push_back({v - 1, EdgeType::Dep, v});
        gs.push_back(g);
        fs.push_back({Mat::Zero(n, 3), std::vector<int>(static_cast<std::size_t>(n), -1)});
    }
    std::vector<const graph::SigmaGraph*> gp;
    std::vector<const embed::NodeInitFeatures*> fp;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        gp.push_back(&gs[i]);
        fp.push_back(&fs[i]);
    }
    return nn::make_batch(gp, fp, virt);
}

}  // namespace

TEST_SUITE("task") {

TEST_CASE("name subtokens are truncated to five") {
    CHECK(name_subtokens("p:M.mj:getItemId:0") == std::vector<std::string>{"get", "item", "id"});
    CHECK(name_subtokens("p:M.mj:setTheVeryLongNameOfThing:3") ==
          std::vector<std::string>{"set", "the", "very", "long", "name"});
}

TEST_CASE("vocabulary ranks by frequency then lexicographically") {
    const std::vector<std::vector<std::string>> names = {
        {"get", "item"}, {"get", "user"}, {"set", "item"}, {"zap"}, {"add"}};
    auto v = NameVocab::build(names, 3);
    CHECK(v.size() == 5);
    CHECK(v.token(0) == "<pad>");
    CHECK(v.token(1) == "<unk>");
    CHECK(v.token(2) == "get");
    CHECK(v.token(3) == "item");
    CHECK(v.token(4) == "add");
    CHECK(v.id_of("zap") == kUnkId);
    CHECK(v.encode({"get", "zap"}) == std::vector<int>{2, kUnkId, kPadId, kPadId, kPadId});
    CHECK(NameVocab::build(names, 3).serialize() == v.serialize());
    auto back = NameVocab::parse(v.serialize());
    CHECK(back.serialize() == v.serialize());
    CHECK(back.id_of("item") == 3);
    CHECK_THROWS_AS(NameVocab::parse("get\n"), ConfigError);
    CHECK_THROWS_AS(NameVocab().id_of("get"), VocabNotBuilt);
    CHECK_THROWS_AS(NameModel(NameVocab(), PoolingKind::Average, 4, 1), VocabNotBuilt);
}

TEST_CASE("name metrics") {
    auto m = name_metrics({"get", "item"}, {"get", "item", "id"});
    CHECK(m.precision == 1.0);
    CHECK(m.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(m.f1 == doctest::Approx(0.8).epsilon(1e-15));
    auto exact = name_metrics({"get", "id"}, {"get", "id"});
    CHECK(exact.f1 == 1.0);
    auto disjoint = name_metrics({"set"}, {"get"});
    CHECK(disjoint.precision == 0.0);
    CHECK(disjoint.recall == 0.0);
    CHECK(disjoint.f1 == 0.0);
    CHECK(name_metrics({}, {"get"}).f1 == 0.0);
    CHECK(name_metrics({"<unk>"}, {"<unk>"}).f1 == 0.0);
    CHECK(name_metrics({"get", "get"}, {"get"}).precision == 0.5);

    NameMetrics micro;
    micro.add({"get", "item"}, {"get", "item", "id"});
    micro.add({"set"}, {"set"});
    micro.finish();
    CHECK(micro.precision == 1.0);
    CHECK(micro.recall == 0.75);
    CHECK(micro.exact == 1);
    NameMetrics all;
    all.add({"a", "b"}, {"b", "a"});
    all.add({"c"}, {"c"});
    all.finish();
    CHECK(all.f1 == 1.0);
}

TEST_CASE("average pooling") {
    Rng rng(2);
    auto one = plain_batch({1}, false);
    Mat h = random_mat(1, 3, rng);
    Pooler avg;
    CHECK(avg.pool(Tensor::constant(h), one).value() == h);

    auto b = plain_batch({4}, false);
    Mat h4 = random_mat(4, 3, rng);
    Mat perm(4, 3);
    perm << h4.row(2), h4.row(0), h4.row(3), h4.row(1);
    CHECK((avg.pool(Tensor::constant(h4), b).value() - avg.pool(Tensor::constant(perm), b).value()).norm() < 1e-15);
}

TEST_CASE("attention pooling") {
    Rng rng(3);
    nn::ParamStore store;
    Pooler att(PoolingKind::Attention, 3, store, rng);
    auto b = plain_batch({3, 5}, false);
    Mat h = random_mat(8, 3, rng, 2.0);
    Mat alpha = att.attention(Tensor::constant(h), b).value();
    CHECK(std::abs(alpha.topRows(3).sum() - 1.0) < 1e-12);
    CHECK(std::abs(alpha.bottomRows(5).sum() - 1.0) < 1e-12);

    auto one = plain_batch({1}, false);
    Mat h1 = random_mat(1, 3, rng);
    Mat expect = h1 * store.get("name.pool.proj").value();
    CHECK((att.pool(Tensor::constant(h1), one).value() - expect).norm() < 1e-14);
}

TEST_CASE("virtual node pooling reads the virtual rows") {
    auto b = plain_batch({2, 3}, true);
    REQUIRE(b.virtual_node.size() == 2);
    Rng rng(4);
    Mat h = random_mat(b.num_nodes, 2, rng);
    nn::ParamStore store;
    Pooler vp(PoolingKind::VirtualNode, 2, store, rng);
    Mat p = vp.pool(Tensor::constant(h), b).value();
    CHECK(p.row(0) == h.row(b.virtual_node[0]));
    CHECK(p.row(1) == h.row(b.virtual_node[1]));
    CHECK_THROWS_AS(vp.pool(Tensor::constant(h.topRows(5)), plain_batch({2, 3}, false)), ConfigError);
}

TEST_CASE("zero head gives uniform distributions and decoding stops at pad") {
    nn::ParamStore store;
    Rng rng(5);
    NameHead head(3, 6, store, rng);
    for (auto& w : head.w) Tensor(w).mutable_value().setZero();
    auto logits = head.logits(Tensor::constant(random_mat(2, 3, rng)));
    for (const auto& l : logits) {
        Mat p = nn::softmax_rows(l.value());
        CHECK((p.array() - 1.0 / 6.0).abs().maxCoeff() < 1e-15);
    }
    NameVocab v = NameVocab::build({{"a", "b", "c", "d"}});
    std::array<Tensor, kMaxNameLength> manual;
    const int picks[kMaxNameLength] = {2, 4, kPadId, 3, 3};
    for (int i = 0; i < kMaxNameLength; ++i) {
        Mat m = Mat::Zero(1, v.size());
        m(0, picks[i]) = 1.0;
        manual[i] = Tensor::constant(m);
    }
    CHECK(decode_names(manual, v)[0] == std::vector<std::string>{"a", "c"});
}

TEST_CASE("name targets are truncated and padded") {
    NameVocab v = NameVocab::build({{"aa", "bb", "cc", "dd", "ee", "ff"}});
    auto ids = v.encode(name_subtokens("p:F.mj:aaBbCcDdEeFf:0"));
    CHECK(std::find(ids.begin(), ids.end(), v.id_of("ff")) == ids.end());
    CHECK(ids.size() == kMaxNameLength);
    CHECK(std::count(ids.begin(), ids.end(), kPadId) == 0);
}

TEST_CASE("pooling, head and scorer gradients") {
    Rng rng(6);
    auto b = plain_batch({3, 4}, true);
    nn::ParamStore store;
    Tensor h = store.add("h", random_mat(b.num_nodes, 4, rng));
    Pooler att(PoolingKind::Attention, 4, store, rng);
    NameHead head(4, 5, store, rng);
    LinkScorer dm(ScorerKind::DistMult, 4, 6, store, rng, "dm");
    LinkScorer mlp(ScorerKind::Mlp, 4, 6, store, rng, "mlp");
    Tensor(store.get("mlp.mlp.b1")).mutable_value() = random_mat(1, 6, rng, 0.2);
    std::vector<std::pair<std::string, Tensor>> all(store.all().begin(), store.all().end());
    const std::vector<std::vector<int>> targets = {{2, 3, 0, 0, 0}, {4, 0, 0, 0, 0}};
    for (auto kind : {PoolingKind::Average, PoolingKind::VirtualNode, PoolingKind::Attention}) {
        Pooler p = kind == PoolingKind::Attention ? att : Pooler::attach(kind, store);
        auto rep = nn::grad_check([&] { return name_loss(head.logits(p.pool(h, b)), targets); }, all);
        INFO(to_string(kind) << " " << rep.worst);
        CHECK(rep.max_rel_error < 1e-4);
    }
    const std::vector<int> src = {0, 1, 5, 2}, dst = {1, 2, 6, 0};
    const std::vector<EdgeType> rel = {EdgeType::Dep, EdgeType::Receiver, EdgeType::Dep, EdgeType::InvDep};
    for (const LinkScorer* s : {&dm, &mlp}) {
        auto rep = nn::grad_check([&] { return nn::sum(nn::softplus(s->score(h, src, rel, dst))); }, all);
        INFO(to_string(s->kind()) << " " << rep.worst);
        CHECK(rep.max_rel_error < 1e-4);
    }
}

TEST_CASE("distmult score") {
    Eigen::VectorXd hu(2), r(2), hv(2);
    hu << 1, 2;
    r << 1, 0;
    hv << 3, 4;
    CHECK(distmult_score(hu, r, hv) == 3.0);
    CHECK(distmult_score(hu, Eigen::VectorXd::Zero(2), hv) == 0.0);
    Eigen::VectorXd eq = Eigen::VectorXd::Constant(2, 0.7);
    CHECK(distmult_score(hu, eq, hv) == distmult_score(hv, eq, hu));

    nn::ParamStore store;
    Rng rng(1);
    LinkScorer s(ScorerKind::DistMult, 2, 1, store, rng);
    Mat rv(1, 2);
    rv << 1, 0;
    Tensor(store.get("link.rel.dep")).mutable_value() = rv;
    Mat h(2, 2);
    h << 1, 2, 3, 4;
    CHECK(s.score(Tensor::constant(h), {0}, {EdgeType::Dep}, {1}).item() == 3.0);
}

TEST_CASE("ranks and link evaluation") {
    CHECK(mid_rank(5.0, std::vector<double>(200, 1.0)) == 1.0);
    CHECK(mid_rank(1.0, std::vector<double>(200, 1.0)) == 101.0);
    CHECK(mid_rank(1.0, {2.0, 1.0, 0.0}) == 2.5);

    std::vector<LinkQuery> qs;
    for (int i = 0; i < 5; ++i) {
        LinkQuery q{0, EdgeType::Dep, 1, {}};
        for (int v = 2; v < 300; ++v) q.candidates.push_back(v);
        qs.push_back(q);
    }
    auto best = link_eval(qs, [](const auto& s, const auto&, const auto& d) {
        std::vector<double> out;
        for (std::size_t i = 0; i < s.size(); ++i) out.push_back(d[i] == 1 ? 10.0 : 0.0);
        return out;
    });
    CHECK(best.mrr == 1.0);
    CHECK(best.hit1 == 1.0);
    CHECK(best.pos.mean == 10.0);
    CHECK(best.welch.p == 0.0);

    auto flat = link_eval(qs, [](const auto& s, const auto&, const auto&) { return std::vector<double>(s.size(), 0.5); });
    CHECK(flat.mrr == doctest::Approx(1.0 / 101.0).epsilon(1e-15));
    CHECK(flat.hit10 == 0.0);

    auto base = [](const std::vector<int>& s, const std::vector<EdgeType>&, const std::vector<int>& d) {
        std::vector<double> out;
        for (std::size_t i = 0; i < s.size(); ++i) out.push_back(std::sin(d[i] * 1.7) + 0.01 * d[i]);
        return out;
    };
    auto a = link_eval(qs, base, 200, 9);
    auto b = link_eval(
        qs,
        [&](const auto& s, const auto& r, const auto& d) {
            auto v = base(s, r, d);
            for (double& x : v) x = 2 * x + 1;
            return v;
        },
        200, 9);
    CHECK(a.mrr == b.mrr);
    CHECK(a.hit3 == b.hit3);

    CHECK_THROWS_AS(link_eval({}, base), NoTestEdges);
}

TEST_CASE("random scores reproduce the K/201 baseline") {
    std::vector<LinkQuery> qs;
    LinkQuery proto{0, EdgeType::Dep, 1, {}};
    for (int v = 2; v < 400; ++v) proto.candidates.push_back(v);
    qs.assign(20000, proto);
    Rng rng(77);
    auto m = link_eval(qs, [&](const auto& s, const auto&, const auto&) {
        std::vector<double> out(s.size());
        for (double& x : out) x = rng.uniform();
        return out;
    });
    CHECK(std::abs(m.hit1 - 1.0 / 201) < 0.005);
    CHECK(std::abs(m.hit3 - 3.0 / 201) < 0.005);
    CHECK(std::abs(m.hit10 - 10.0 / 201) < 0.005);
}

TEST_CASE("welch test") {
    ScoreStats a{1.0, 0.5, 50}, b{0.8, 0.3, 2000};
    auto w = welch_test(a, b);
    const double va = 0.25 / 50, vb = 0.09 / 2000;
    CHECK(w.t == doctest::Approx(0.2 / std::sqrt(va + vb)).epsilon(1e-12));
    CHECK(w.df == doctest::Approx((va + vb) * (va + vb) / (va * va / 49 + vb * vb / 1999)).epsilon(1e-12));
    CHECK(w.p > 0.0);
    CHECK(w.p < 0.01);

    ScoreStats c{0.0, 1.0, 100000}, d{0.005, 1.0, 100000};
    auto big = welch_test(c, d);
    const double normal = std::erfc(std::abs(big.t) / std::sqrt(2.0));
    CHECK(big.p == doctest::Approx(normal).epsilon(1e-4));
    CHECK(welch_test(a, a).p == doctest::Approx(1.0));
}

TEST_CASE("held-out edges agree across flavors and leave message passing") {
    auto s0 = small_corpus(12, graph::Flavor::Sigma0);
    auto s1 = small_corpus(12, graph::Flavor::Sigma1);
    REQUIRE(s0.graphs.size() == s1.graphs.size());
    auto h0 = hold_out_edges(s0.graphs, 0.1, 5);
    auto h1 = hold_out_edges(s1.graphs, 0.1, 5);
    CHECK(h0 == h1);
    for (std::size_t i = 0; i < h0.size(); ++i) {
        const auto& g = s0.graphs[i];
        CHECK(h0[i].size() == std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.1 * g.edges.size()))));
        auto reduced = embed::add_inverse_edges(without_edges(g, h0[i]));
        for (const auto& e : h0[i]) {
            CHECK(std::find(reduced.edges.begin(), reduced.edges.end(), e) == reduced.edges.end());
            const graph::SigmaEdge inv{e.dst, graph::inverse_of(e.etype), e.src};
            CHECK(std::find(reduced.edges.begin(), reduced.edges.end(), inv) == reduced.edges.end());
        }
        CHECK(without_edges(embed::add_inverse_edges(g), h0[i]).edges.size() == reduced.edges.size());
    }
    CHECK(hold_out_edges(s0.graphs, 0.1, 6) != h0);
}

TEST_CASE("link fine-tuning runs for both scorers") {
    Setup s(small_corpus(12));
    for (auto kind : {ScorerKind::Mlp, ScorerKind::DistMult}) {
        LinkConfig cfg;
        cfg.scorer = kind;
        cfg.epochs = 5;
        cfg.eval_negatives = 50;
        auto r = finetune_link(s.corpus, s.state, cfg);
        CHECK(r.epoch_loss.size() == 5);
        CHECK(r.metrics.queries > 0);
        CHECK(r.metrics.mrr > 0.0);
        CHECK(r.metrics.mrr <= 1.0);
        CHECK(r.metrics.hit1 <= r.metrics.hit3);
        CHECK(r.metrics.hit3 <= r.metrics.hit10);
        if (kind == ScorerKind::Mlp) {
            CHECK(r.metrics.pos.mean > 0.0);
            CHECK(r.metrics.pos.mean < 1.0);
        }
        auto again = finetune_link(s.corpus, s.state, cfg);
        CHECK(again.metrics.mrr == r.metrics.mrr);

        auto ckpt = link_model_checkpoint(r.model);
        auto back = link_model_from_checkpoint(ckpt);
        auto data = prepare_link_data(s.corpus, s.state, s.ids, s.ids, cfg.held_out_ratio, cfg.seed);
        CHECK(evaluate_link(data, back, 50, 3).mrr == evaluate_link(data, r.model, 50, 3).mrr);
    }
}

TEST_CASE("untrained scorer is close to the random baseline") {
    Setup s(small_corpus(120), 8, 2);
    auto data = prepare_link_data(s.corpus, s.state, s.ids, s.ids, 0.1, 0);
    double hit[3] = {0, 0, 0};
    long queries = 0;
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        LinkConfig cfg;
        cfg.epochs = 0;
        cfg.seed = static_cast<std::uint64_t>(seed);
        auto r = finetune_link(data, cfg);
        hit[0] += r.metrics.hit1 / seeds;
        hit[1] += r.metrics.hit3 / seeds;
        hit[2] += r.metrics.hit10 / seeds;
        queries += r.metrics.queries;
    }
    INFO(queries);
    CHECK(queries >= 2000);
    CHECK(std::abs(hit[0] - 1.0 / 201) < 0.02);
    CHECK(std::abs(hit[1] - 3.0 / 201) < 0.02);
    CHECK(std::abs(hit[2] - 10.0 / 201) < 0.02);
}

TEST_CASE("overfitting one method recovers its name") {
    graph::SigmaGraph g = graph::build_sigma0(
        frontend::parse_method_source("int getItemId(Item item) { return item.getId(); }"), "p:M.mj:getItemId:0");
    Setup s(corpus::assemble_corpus({g}, {"p"}));
    NameConfig cfg;
    cfg.epochs = 150;
    cfg.lr = 1e-2;
    for (auto kind : {PoolingKind::Average, PoolingKind::Attention, PoolingKind::VirtualNode}) {
        cfg.pooling = kind;
        auto r = finetune_name(s.corpus, s.prepared, s.state, cfg);
        auto pred = predict_names(s.prepared, {0}, s.state, r.model);
        INFO(to_string(kind));
        CHECK(pred[0] == std::vector<std::string>{"get", "item", "id"});
        CHECK(r.train.f1 == 1.0);
    }
}

TEST_CASE("name fine-tuning with splits, frozen and full") {
    auto c = small_corpus(30);
    c.splits = corpus::split_corpus(c, {}, 4);
    Setup s(c);
    NameConfig cfg;
    cfg.epochs = 3;
    cfg.freeze_encoder = true;
    const Mat before = s.state.store->get("enc.l0.self").value();
    auto frozen = finetune_name(s.corpus, s.prepared, s.state, cfg);
    CHECK(s.state.store->get("enc.l0.self").value() == before);
    CHECK(frozen.log.size() == 3);
    CHECK(frozen.best_epoch >= 1);
    CHECK(frozen.test.methods == static_cast<long>(s.corpus.graphs_in(corpus::Split::Test).size()));

    cfg.freeze_encoder = false;
    auto full = finetune_name(s.corpus, s.prepared, s.state, cfg);
    CHECK(s.state.store->get("enc.l0.self").value() != before);
    CHECK(full.valid.f1 >= 0.0);
    CHECK(full.valid.f1 <= 1.0);

    auto ckpt = name_model_checkpoint(full.model);
    auto back = name_model_from_checkpoint(ckpt);
    CHECK(back.vocab.serialize() == full.model.vocab.serialize());
    auto ids = s.corpus.graphs_in(corpus::Split::Test);
    CHECK(predict_names(s.prepared, ids, s.state, back) == predict_names(s.prepared, ids, s.state, full.model));
}

TEST_CASE("embedding export format") {
    Setup s(small_corpus(4));
    std::ostringstream nodes, methods;
    export_node_embeddings(nodes, s.prepared, {0, 1}, s.state);
    export_method_embeddings(methods, s.prepared, {0, 1}, s.state);
    std::istringstream in(nodes.str());
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
        ++count;
        std::istringstream fields(line);
        std::string gid, nid, feat, vec;
        std::getline(fields, gid, '\t');
        std::getline(fields, nid, '\t');
        std::getline(fields, feat, '\t');
        std::getline(fields, vec);
        std::istringstream vs(vec);
        double x;
        int d = 0;
        while (vs >> x) ++d;
        CHECK(d == 8);
    }
    CHECK(count == s.corpus.graphs[0].num_nodes() + s.corpus.graphs[1].num_nodes());
    const std::string mtext = methods.str();
    CHECK(std::count(mtext.begin(), mtext.end(), '\n') == 2);
    std::ostringstream again;
    export_node_embeddings(again, s.prepared, {0, 1}, s.state);
    CHECK(again.str() == nodes.str());
}

}
