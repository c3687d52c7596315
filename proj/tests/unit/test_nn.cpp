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

#include <cmath>

#include "codegraph/embed/embed.hpp"
#include "codegraph/frontend/parser.hpp"
#include "codegraph/graph/builder.hpp"
#include "codegraph/nn/checkpoint.hpp"
#include "codegraph/nn/gradcheck.hpp"
#include "codegraph/nn/rgcn.hpp"
#include "codegraph/synth/synth.hpp"

using namespace codegraph;
using namespace codegraph::nn;
using graph::EdgeType;
using graph::SigmaEdge;

namespace {

Mat random_mat(Eigen::Index r, Eigen::Index c, Rng& rng, double a = 1.0) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(-a, a);
    }
    return m;
}

std::vector<Tensor> weights_only(int r, const Tensor& w) {
    std::vector<Tensor> ws(graph::kNumEdgeTypes);
    ws[r] = w;
    return ws;
}

// A broken square: value x^2, claimed gradient 3x.
Tensor broken_square(const Tensor& x) {
    auto n = std::make_shared<detail::Node>();
    n->value = x.value().cwiseProduct(x.value());
    n->requires_grad = true;
    n->parents.push_back(x.node());
    n->backward = [](detail::Node& self) {
        self.parents[0]->accumulate(3.0 * self.parents[0]->value.cwiseProduct(self.grad));
    };
    return Tensor::from_node(n);
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("layer with identity weights copies the neighbor") {
    auto adj = relation_adjacency(2, {{1, EdgeType::Dep, 0}});
    Mat h(2, 3);
    h << 1, 2, 3, 4, 5, 6;
    Tensor self = Tensor::constant(Mat::Zero(3, 3));
    auto out = rgcn_layer_forward(Tensor::constant(h), adj, weights_only(0, Tensor::constant(Mat::Identity(3, 3))),
                                  &self, false);
    CHECK(out.value().row(0) == h.row(1));
    CHECK(out.value().row(1).isZero());
}

TEST_CASE("isolated node keeps its row through the self loop") {
    auto adj = relation_adjacency(1, {});
    Mat h(1, 2);
    h << 3, -1;
    Tensor self = Tensor::constant(Mat::Identity(2, 2));
    auto out = rgcn_layer_forward(Tensor::constant(h), adj, std::vector<Tensor>(graph::kNumEdgeTypes), &self, false);
    CHECK(out.value() == h);
}

TEST_CASE("two neighbors under one relation are averaged") {
    auto adj = relation_adjacency(3, {{1, EdgeType::Receiver, 0}, {2, EdgeType::Receiver, 0}});
    Rng rng(1);
    Mat h = random_mat(3, 4, rng);
    Mat w = random_mat(4, 2, rng);
    Tensor self = Tensor::constant(Mat::Zero(4, 2));
    auto out = rgcn_layer_forward(Tensor::constant(h), adj,
                                  weights_only(graph::index_of(EdgeType::Receiver), Tensor::constant(w)), &self, false);
    Mat expect = 0.5 * (h.row(1) + h.row(2)) * w;
    CHECK((out.value().row(0) - expect).norm() < 1e-14);
}

TEST_CASE("parallel edges count once in the normalizer") {
    auto adj = relation_adjacency(2, {{1, EdgeType::Dep, 0}, {1, EdgeType::Dep, 0}});
    CHECK(adj[0].coeff(0, 1) == 1.0);
    CHECK(adj[0].nonZeros() == 1);
}

namespace {

struct Fixture {
    std::vector<graph::SigmaGraph> graphs;
    std::vector<embed::NodeInitFeatures> feats;
    embed::SubwordEmbedder embedder;
    Mat global;

    explicit Fixture(int dim, std::vector<std::string> sources) : embedder([dim] {
          embed::SubwordConfig c;
          c.dim = dim;
          return c;
      }()) {
        global = embed::initial_global_embeddings(embedder);
        int i = 0;
        for (const auto& s : sources) {
            graphs.push_back(embed::add_inverse_edges(
                graph::build_sigma1(frontend::parse_method_source(s), "g" + std::to_string(i++))));
        }
        for (const auto& g : graphs) feats.push_back(embed::node_init_features(g, embedder, global));
    }

    GraphBatch batch(bool virt = false) const {
        std::vector<const graph::SigmaGraph*> gs;
        std::vector<const embed::NodeInitFeatures*> fs;
        for (std::size_t i = 0; i < graphs.size(); ++i) {
            gs.push_back(&graphs[i]);
            fs.push_back(&feats[i]);
        }
        return make_batch(gs, fs, virt);
    }
};

}  // namespace

TEST_CASE("encoder with no layers returns its input") {
    Fixture f(8, {"void f(int a) { g(a); }"});
    ParamStore store;
    Rng rng(1);
    RgcnConfig cfg{8, 8, 0, 0.2, true};
    RgcnEncoder enc(cfg, f.global, store, rng);
    auto b = f.batch();
    auto out = enc.forward(b, false, rng);
    CHECK(out.value() == enc.input(b).value());
}

TEST_CASE("eval mode is deterministic and train mode applies dropout") {
    Fixture f(8, {"void f(int a) { if (a > 1) { g(a); } }"});
    ParamStore store;
    Rng rng(1);
    RgcnEncoder enc({8, 16, 2, 0.5, true}, f.global, store, rng);
    auto b = f.batch();
    Rng r1(5), r2(6);
    CHECK(enc.forward(b, false, r1).value() == enc.forward(b, false, r2).value());
    Rng r3(5);
    CHECK(enc.forward(b, true, r3).value() != enc.forward(b, false, r1).value());
}

TEST_CASE("two layers see exactly two hops") {
    // Chain ENTRY -> a -> b -> c -> d -> EXIT through dep edges.
    Fixture f(8, {"void f() { a(); b(); c(); d(); }"});
    ParamStore store;
    Rng rng(3);
    RgcnEncoder enc({8, 8, 2, 0.0, true}, f.global, store, rng);
    auto b = f.batch();
    Rng r(0);
    const Mat base = enc.forward(b, false, r).value();
    // Node 2 is a(); node 5 is d(), three hops away along dep / inv_dep.
    GraphBatch far = b;
    far.x_const.row(5).array() += 1.0;
    CHECK((enc.forward(far, false, r).value().row(2) - base.row(2)).norm() == 0.0);
    GraphBatch near = b;
    near.x_const.row(4).array() += 1.0;
    CHECK((enc.forward(near, false, r).value().row(2) - base.row(2)).norm() > 0.0);
}

TEST_CASE("encoder is permutation equivariant") {
    Rng rng(9);
    const int n = 9, d = 5;
    std::vector<SigmaEdge> edges;
    for (int k = 0; k < 20; ++k) {
        edges.push_back({static_cast<int>(rng.uniform_index(n)),
                         static_cast<EdgeType>(rng.uniform_index(graph::kNumBaseEdgeTypes)),
                         static_cast<int>(rng.uniform_index(n))});
    }
    std::vector<std::vector<Tensor>> w(2, std::vector<Tensor>(graph::kNumEdgeTypes));
    for (auto& layer : w) {
        for (auto& t : layer) t = Tensor::constant(random_mat(d, d, rng));
    }
    Tensor self = Tensor::constant(random_mat(d, d, rng));
    auto encode = [&](const Mat& x, const std::vector<SigmaEdge>& es) {
        auto adj = relation_adjacency(n, es);
        Tensor h = Tensor::constant(x);
        h = rgcn_layer_forward(h, adj, w[0], &self, true);
        return rgcn_layer_forward(h, adj, w[1], &self, false).value();
    };
    Mat x = random_mat(n, d, rng);
    auto perm = rng.permutation(n);
    Mat px(n, d);
    std::vector<SigmaEdge> pe;
    for (int i = 0; i < n; ++i) px.row(static_cast<Eigen::Index>(perm[i])) = x.row(i);
    for (const auto& e : edges) pe.push_back({static_cast<int>(perm[e.src]), e.etype, static_cast<int>(perm[e.dst])});
    Mat a = encode(x, edges), b = encode(px, pe);
    for (int i = 0; i < n; ++i) CHECK((a.row(i) - b.row(static_cast<Eigen::Index>(perm[i]))).norm() < 1e-12);
}

TEST_CASE("squared norm gradient") {
    Rng rng(1);
    Tensor w = Tensor::parameter(random_mat(3, 4, rng));
    Tensor loss = sum(mul(w, w));
    loss.backward();
    CHECK((w.grad() - 2.0 * w.value()).norm() < 1e-14);
    CHECK_THROWS_AS(mul(w, w).backward(), NotScalarLoss);
}

TEST_CASE("eval-mode dropout leaves gradients unchanged") {
    Rng rng(2);
    Tensor w = Tensor::parameter(random_mat(3, 3, rng));
    Tensor x = Tensor::constant(random_mat(4, 3, rng));
    Rng dr(1);
    sum(relu(dropout(matmul(x, w), 0.2, false, dr))).backward();
    Mat with = w.grad();
    w.zero_grad();
    sum(relu(matmul(x, w))).backward();
    CHECK(with == w.grad());
}

TEST_CASE("operator gradients pass the checker") {
    Rng rng(4);
    Tensor a = Tensor::parameter(random_mat(5, 3, rng));
    Tensor b = Tensor::parameter(random_mat(5, 3, rng));
    Tensor w = Tensor::parameter(random_mat(3, 4, rng));
    Tensor row = Tensor::parameter(random_mat(1, 3, rng));
    Tensor col = Tensor::parameter(random_mat(5, 1, rng));
    Tensor pos = Tensor::parameter((random_mat(5, 3, rng).array() + 2.0).matrix());
    SpMat s(4, 5);
    s.insert(0, 1) = 0.5;
    s.insert(2, 4) = -1.5;
    s.insert(3, 0) = 2.0;
    std::vector<int> seg = {0, 1, 0, 2, 1};
    auto loss = [&] {
        Tensor t = add(matmul(a, w), matmul(mul(b, a), w));
        t = concat_cols(sigmoid(t), tanh(sub(a, b)));
        Tensor u = softplus(add_rowvec(mul_rowvec(a, row), row));
        Tensor v = mul_colvec(u, col);
        Tensor sm = segment_softmax(row_dot(a, b), seg, 3);
        Tensor ce = softmax_cross_entropy(matmul(a, w), {0, 3, -1, 1, 2});
        Tensor g = gather_rows(scatter_add_rows(v, {2, 0, 2, 1, 0}, 3), {0, 2, 2});
        Tensor sp = spmm(s, a);
        return add(add(add(add(sum(t), sum(row_sqnorm(v))), sum(mul(sm, col))), add(ce, mean(g))),
                   add(add(sum(log(pos)), sum(sp)), sum(mean_rows(segment_mean(b, seg, 3)))));
    };
    auto rep = grad_check(loss, {{"a", a}, {"b", b}, {"w", w}, {"row", row}, {"col", col}, {"pos", pos}});
    INFO(rep.worst);
    CHECK(rep.max_rel_error < 1e-6);
}

TEST_CASE("checker sanity") {
    Rng rng(1);
    Tensor w = Tensor::parameter(random_mat(3, 3, rng));
    auto quad = grad_check([&] { return sum(mul(w, w)); }, {{"w", w}});
    CHECK(quad.max_rel_error < 1e-10);
    auto bad = grad_check([&] { return sum(broken_square(w)); }, {{"w", w}});
    CHECK(bad.max_rel_error > 1e-2);
    CHECK_FALSE(bad.passed);
}

TEST_CASE("encoder gradient including strict and virtual rows") {
    Fixture f(6, {"int f(int a) { int s = 0; while (a > 0) { s = s + a; a = a - 1; } return s; }",
                  "void g(Request r) { try { r.open(); } catch (Exception e) { r.log(e); } }"});
    ParamStore store;
    Rng rng(11);
    RgcnEncoder enc({6, 5, 2, 0.2, true}, f.global, store, rng);
    auto b = f.batch(true);
    Tensor proj = Tensor::constant(random_mat(5, 1, rng));
    auto loss = [&] {
        Rng dr(42);
        Tensor h = enc.forward(b, true, dr);
        return sum(tanh(matmul(h, proj)));
    };
    std::vector<std::pair<std::string, Tensor>> ps(store.all().begin(), store.all().end());
    auto rep = grad_check(loss, ps);
    INFO(rep.worst);
    CHECK(rep.max_rel_error < 1e-4);
}

TEST_CASE("adam first step and fixed point") {
    ParamStore s;
    Tensor p = s.add("p", Mat::Constant(1, 1, 0.5));
    p.mutable_grad()(0, 0) = 1.0;
    Adam opt({0.01, 0.9, 0.999, 1e-8, 0.0});
    opt.step(s);
    CHECK(std::abs((p.value()(0, 0) - 0.5) + 0.01) < 1e-6);

    ParamStore z;
    Tensor q = z.add("q", Mat::Constant(2, 2, 3.0));
    Adam still({0.01, 0.9, 0.999, 1e-8, 0.0});
    for (int i = 0; i < 5; ++i) still.step(z);
    CHECK(q.value() == Mat::Constant(2, 2, 3.0));
}

TEST_CASE("adam weight decay and determinism") {
    auto run = [] {
        ParamStore s;
        Rng rng(3);
        Tensor p = s.add("p", random_mat(4, 4, rng));
        Adam opt({0.01});
        for (int i = 0; i < 20; ++i) {
            s.zero_grad();
            sum(mul(p, p)).backward();
            opt.step(s);
        }
        return p.value();
    };
    CHECK(run() == run());
    ParamStore s;
    Tensor p = s.add("p", Mat::Constant(1, 1, 2.0));
    p.zero_grad();
    Adam opt({0.1, 0.9, 0.999, 1e-8, 0.5});
    opt.step(s);
    CHECK(p.value()(0, 0) < 2.0);
}

TEST_CASE("mlp shapes") {
    ParamStore s;
    Rng rng(1);
    Mlp m(s, "mlp", 4, 6, 2, rng);
    CHECK(m.forward(Tensor::constant(Mat::Ones(3, 4))).value().cols() == 2);
    CHECK_THROWS_AS(m.forward(Tensor::constant(Mat::Ones(3, 5))), ShapeMismatch);
    CHECK(s.size() == 4);
}

TEST_CASE("checkpoint round trip and guards") {
    ParamStore s;
    Rng rng(1);
    s.add("a.w", random_mat(3, 2, rng));
    s.add("b.w", random_mat(1, 5, rng));
    Checkpoint c = snapshot(s);
    c.manifest["hidden"] = "300";
    auto path = std::filesystem::temp_directory_path() / "codegraph_ckpt.bin";
    save_checkpoint(path, c);
    Checkpoint back = load_checkpoint(path);
    CHECK(back.manifest == c.manifest);
    CHECK(back.tensors == c.tensors);

    ParamStore t;
    t.add("a.w", Mat::Zero(3, 2));
    restore(t, back, "a.");
    CHECK(t.get("a.w").value() == s.get("a.w").value());

    std::string bytes = encode_checkpoint(c);
    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 4)), CheckpointError);
    std::string wrong = bytes;
    wrong[8] = 9;
    CHECK_THROWS_AS(decode_checkpoint(wrong), CheckpointError);
    ParamStore u;
    u.add("a.w", Mat::Zero(2, 2));
    CHECK_THROWS_AS(restore(u, back, ""), CheckpointError);
}

}
