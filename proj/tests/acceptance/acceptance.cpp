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

// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// Usage: acceptance [substring ...] runs only criteria whose key contains one
// of the substrings.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "codegraph/cli/commands.hpp"
#include "codegraph/corpus/build.hpp"
#include "codegraph/corpus/serialize.hpp"
#include "codegraph/graph/builder.hpp"
#include "codegraph/graph/validate.hpp"
#include "codegraph/nn/gradcheck.hpp"
#include "codegraph/pretrain/pretrain.hpp"
#include "codegraph/synth/synth.hpp"
#include "codegraph/task/link.hpp"
#include "codegraph/task/name.hpp"

using namespace codegraph;
using graph::EdgeType;
using graph::NodeType;
using graph::SigmaEdge;
using nn::Mat;
using nn::Tensor;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr double kGradTolerance = 1e-4;
constexpr int kGradSeeds = 20;
constexpr double kGradBudgetSeconds = 120;
constexpr int kMotifGraphs = 200;
constexpr double kMotifBudgetSeconds = 60;
constexpr int kInvariantMethods = 1000;
constexpr double kInvariantBudgetSeconds = 60;
constexpr int kBaselineQueries = 20000;
constexpr double kBaselineTolerance = 0.005;
constexpr double kSeparationP = 0.01;
constexpr double kSeparationBudgetSeconds = 600;
constexpr int kDirectionalSeeds = 10;
constexpr int kDirectionalWins = 7;
constexpr double kOverfitF1 = 0.9;
constexpr int kOverfitEpochs = 100;

// Model sizes of the statistical runs.
constexpr int kDim = 32;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(double x, int prec = 4) {
    std::ostringstream s;
    s.precision(prec);
    s << x;
    return s.str();
}

Mat random_mat(Eigen::Index r, Eigen::Index c, Rng& rng, double a = 1.0) {
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.uniform(-a, a);
    }
    return m;
}

corpus::Corpus fixture(std::size_t methods, std::size_t packages, std::uint64_t seed, graph::Flavor flavor) {
    auto built = corpus::build_graphs(synth::as_source_units(synth::fixture_corpus(methods, packages, seed)), flavor);
    if (!built.issues.empty()) throw InternalError("fixture corpus failed to build: " + built.issues[0].message);
    return corpus::assemble_corpus(std::move(built.graphs), std::move(built.packages));
}

// ---------------------------------------------------------------- gradients

Outcome gradient_suite() {
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string worst_name;
    int checks = 0;
    synth::RandomMethodOptions small;
    small.max_depth = 2;
    small.max_block_statements = 3;
    small.max_params = 2;
    for (int seed = 0; seed < kGradSeeds; ++seed) {
        Rng rng(9000 + static_cast<std::uint64_t>(seed));
        graph::SigmaGraph g;
        do {
            g = graph::build_sigma1(frontend::parse_method_source(synth::random_method(rng, small)),
                                    "p:F.mj:m" + std::to_string(seed) + ":0");
        } while (g.num_nodes() < 6 || g.num_nodes() > 12);
        const auto c = corpus::assemble_corpus({g}, {"p"});
        embed::SubwordConfig sw;
        sw.dim = 6;
        const auto prepared = pretrain::prepare_corpus(c, embed::SubwordEmbedder(sw));
        nn::ParamStore store;
        nn::RgcnEncoder enc({6, 5, 2, 0.2, true}, prepared.global_init, store, rng);
        const auto batch = pretrain::make_prepared_batch(prepared, {0}, false);
        const auto vbatch = pretrain::make_prepared_batch(prepared, {0}, true);
        const int n = batch.real_nodes();
        const std::vector<NodeType> ntype(batch.ntype.begin(), batch.ntype.begin() + n);

        auto diag = pretrain::make_diagonals(store, 5);
        for (auto& [k, t] : diag) Tensor(t).mutable_value() = random_mat(1, 5, rng);
        Tensor him_w = store.add("him.w", random_mat(5, 5, rng));
        nn::Mlp mt(store, "mt", 5, 4, pretrain::kNumMotifs, rng);
        Tensor(mt.b1).mutable_value() = random_mat(1, 4, rng, 0.1);
        task::Pooler att(task::PoolingKind::Attention, 5, store, rng);
        task::NameHead head(5, 7, store, rng);
        task::LinkScorer dm(task::ScorerKind::DistMult, 5, 4, store, rng, "dm");
        task::LinkScorer mlp(task::ScorerKind::Mlp, 5, 4, store, rng, "lm");
        Tensor(store.get("lm.mlp.b1")).mutable_value() = random_mat(1, 4, rng, 0.2);

        pretrain::MrwConfig mc;
        auto pairs = pretrain::walk_pairs(pretrain::sample_metapath_walks(batch.num_nodes, batch.edges, mc, rng));
        auto neg = pretrain::sample_negatives(pairs, ntype, mc.negatives, rng);
        pairs.insert(pairs.end(), neg.begin(), neg.end());
        for (int k = 0; k < 4; ++k) {
            pairs.push_back({static_cast<int>(rng.uniform_index(n)), static_cast<int>(rng.uniform_index(n)),
                             rng.bernoulli(0.5) ? 1.0 : -1.0});
        }
        std::vector<int> perm(static_cast<std::size_t>(batch.num_nodes));
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        std::vector<int> shuffled(perm.begin(), perm.end());
        std::vector<std::vector<int>> groups = {{0, 1, 2}, {3, 4}, {n - 1, n - 2}};
        const std::vector<std::vector<int>> targets = {{2, 3, 4, 0, 0}};
        std::vector<int> src, dst;
        std::vector<EdgeType> rel;
        for (const auto& e : g.edges) {
            src.push_back(e.src);
            rel.push_back(e.etype);
            dst.push_back(e.dst);
        }
        const std::uint64_t dseed = rng.next();
        const pretrain::LossWeights weights{{rng.uniform(0.1, 2), rng.uniform(0.1, 2), rng.uniform(0.1, 2),
                                             rng.uniform(0.1, 2)}};

        auto h_of = [&] {
            Rng dr(dseed);
            return enc.forward(batch, true, dr);
        };
        auto hc_of = [&] {
            Rng dr(dseed + 1);
            return enc.forward_from(nn::gather_rows(enc.input(batch), shuffled), batch, true, dr);
        };
        auto mrw = [&] { return pretrain::mrw_loss(pairs, h_of(), ntype, diag); };
        auto him = [&] { return pretrain::him_loss(h_of(), hc_of(), him_w, ntype); };
        auto mtl = [&] { return pretrain::mt_loss(h_of(), prepared.graphs[0].motif_targets, mt); };
        auto ntl = [&] { return pretrain::nt_loss(h_of(), groups); };
        const std::vector<std::pair<std::string, std::function<Tensor()>>> losses = {
            {"mrw", mrw},
            {"him", him},
            {"mt", mtl},
            {"nt", ntl},
            {"combined", [&] { return pretrain::combined_loss({mrw(), him(), mtl(), ntl()}, weights); }},
            {"encoder", [&] { return nn::sum(nn::tanh(h_of())); }},
            {"pool.average",
             [&] { return task::name_loss(head.logits(task::Pooler().pool(h_of(), batch)), targets); }},
            {"pool.attention", [&] { return task::name_loss(head.logits(att.pool(h_of(), batch)), targets); }},
            {"pool.virtual_node",
             [&] {
                 Rng dr(dseed);
                 const auto vp = task::Pooler::attach(task::PoolingKind::VirtualNode, store);
                 return task::name_loss(head.logits(vp.pool(enc.forward(vbatch, true, dr), vbatch)), targets);
             }},
            {"scorer.distmult", [&] { return nn::sum(nn::softplus(dm.score(h_of(), src, rel, dst))); }},
            {"scorer.mlp", [&] { return nn::sum(nn::softplus(mlp.score(h_of(), src, rel, dst))); }},
        };
        const std::vector<std::pair<std::string, Tensor>> params(store.all().begin(), store.all().end());
        nn::GradCheckOptions opt;
        opt.tolerance = kGradTolerance;
        opt.seed = static_cast<std::uint64_t>(seed) + 1;
        for (const auto& [name, fn] : losses) {
            const auto rep = nn::grad_check(fn, params, opt);
            ++checks;
            if (rep.max_rel_error > worst) {
                worst = rep.max_rel_error;
                worst_name = name + " seed " + std::to_string(seed) + " " + rep.worst;
            }
        }
    }
    const double secs = seconds_since(start);
    return {worst < kGradTolerance && secs < kGradBudgetSeconds,
            std::to_string(checks) + " checks, max rel error " + fmt(worst) + " (" + worst_name + ") < " +
                fmt(kGradTolerance) + ", " + fmt(secs, 3) + " s < " + fmt(kGradBudgetSeconds) + " s"};
}

// ---------------------------------------------------------------- motifs

// Every 3- and 4-subset, classified by trying all vertex orderings against
// fixed edge templates in the motif class order.
using Template = std::vector<std::pair<int, int>>;

int match_template(const std::vector<int>& sub, const std::vector<std::vector<bool>>& adj) {
    static const std::vector<std::pair<int, Template>> templates = {
        {3, {{0, 1}, {1, 2}}},
        {3, {{0, 1}, {1, 2}, {0, 2}}},
        {4, {{0, 1}, {1, 2}, {2, 3}}},
        {4, {{0, 1}, {0, 2}, {0, 3}}},
        {4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}},
        {4, {{0, 1}, {1, 2}, {2, 0}, {2, 3}}},
        {4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}}},
        {4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}},
    };
    for (std::size_t c = 0; c < templates.size(); ++c) {
        if (templates[c].first != static_cast<int>(sub.size())) continue;
        std::vector<int> perm(sub.size());
        std::iota(perm.begin(), perm.end(), 0);
        do {
            std::vector<std::vector<bool>> want(sub.size(), std::vector<bool>(sub.size(), false));
            for (auto [a, b] : templates[c].second) want[a][b] = want[b][a] = true;
            bool ok = true;
            for (std::size_t i = 0; i < sub.size() && ok; ++i) {
                for (std::size_t j = i + 1; j < sub.size() && ok; ++j) {
                    ok = adj[sub[perm[i]]][sub[perm[j]]] == want[i][j];
                }
            }
            if (ok) return static_cast<int>(c);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return -1;
}

Outcome motif_oracle() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(31337);
    int mismatches = 0;
    long subsets = 0;
    for (int trial = 0; trial < kMotifGraphs; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_index(12));
        const double p = rng.uniform(0.1, 0.7);
        std::vector<SigmaEdge> edges;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (rng.bernoulli(p / 2)) edges.push_back({a, static_cast<EdgeType>(rng.uniform_index(11)), b});
            }
        }
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (const auto& e : edges) {
            if (e.src != e.dst) adj[e.src][e.dst] = adj[e.dst][e.src] = true;
        }
        std::vector<pretrain::MotifCounts> slow(n, pretrain::MotifCounts{});
        for (int mask = 0; mask < (1 << n); ++mask) {
            const int k = __builtin_popcount(static_cast<unsigned>(mask));
            if (k != 3 && k != 4) continue;
            std::vector<int> sub;
            for (int i = 0; i < n; ++i) {
                if (mask >> i & 1) sub.push_back(i);
            }
            const int c = match_template(sub, adj);
            if (c < 0) continue;
            ++subsets;
            for (int v : sub) slow[v][c] += 1;
        }
        const auto fast = pretrain::count_motifs_all(n, edges);
        for (int v = 0; v < n; ++v) mismatches += fast[v] != slow[v];
    }
    const double secs = seconds_since(start);
    return {mismatches == 0 && secs < kMotifBudgetSeconds,
            std::to_string(kMotifGraphs) + " graphs, " + std::to_string(subsets) + " connected subsets, " +
                std::to_string(mismatches) + " mismatching nodes, " + fmt(secs, 3) + " s < " +
                fmt(kMotifBudgetSeconds) + " s"};
}

// ---------------------------------------------------------------- graph invariants

Outcome graph_invariants() {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(4242);
    std::vector<std::string> failures;
    auto fail = [&](int k, const std::string& what) {
        if (failures.size() < 3) failures.push_back("method " + std::to_string(k) + ": " + what);
    };
    int failed_methods = 0;
    for (int k = 0; k < kInvariantMethods; ++k) {
        const std::size_t before = failures.size();
        const auto ast = frontend::parse_method_source(synth::random_method(rng));
        const auto s0 = graph::build_sigma0(ast, "p:F.mj:" + ast.name + ":" + std::to_string(k));
        const auto s1 = graph::build_sigma1(ast, s0.method_id);
        int entries = 0, exits = 0;
        for (const auto& v : s0.nodes) {
            entries += v.ntype == NodeType::Entry;
            exits += v.ntype == NodeType::Exit;
        }
        if (entries != 1 || exits != 1) fail(k, "entry/exit count");
        std::vector<int> dep_out(s0.nodes.size(), 0);
        for (const auto& e : s0.edges) {
            if (e.etype == EdgeType::Dep) ++dep_out[static_cast<std::size_t>(e.src)];
        }
        for (const auto& v : s0.nodes) {
            if (v.ntype == NodeType::Entry && dep_out[static_cast<std::size_t>(v.id)] != 1) fail(k, "entry out-degree");
            if (v.ntype == NodeType::Control && v.feature == "if" && dep_out[static_cast<std::size_t>(v.id)] != 2) {
                fail(k, "if out-degree");
            }
        }
        if (s0.nodes.size() != s1.nodes.size()) {
            fail(k, "node sets differ");
        } else {
            for (std::size_t i = 0; i < s0.nodes.size(); ++i) {
                if (s0.nodes[i].feature != s1.nodes[i].feature || s0.nodes[i].ntype != s1.nodes[i].ntype) {
                    fail(k, "node sets differ");
                    break;
                }
            }
        }
        for (const auto& e : s0.edges) {
            if (std::find(s1.edges.begin(), s1.edges.end(), e) == s1.edges.end()) {
                fail(k, "sigma0 edge missing from sigma1");
                break;
            }
        }
        for (const auto& var : ast.variables) {
            for (const auto& v : s1.nodes) {
                if (v.ntype != NodeType::Data) continue;
                std::size_t pos = 0;
                while (pos <= v.feature.size()) {
                    auto dot = v.feature.find('.', pos);
                    if (dot == std::string::npos) dot = v.feature.size();
                    const std::string part = v.feature.substr(pos, dot - pos);
                    if (part == var.name) fail(k, "variable name '" + var.name + "' in data feature");
                    pos = dot + 1;
                }
            }
        }
        for (const auto* g : {&s0, &s1}) {
            const auto back = corpus::deserialize_graph(corpus::serialize_graph(*g));
            if (!graph::structurally_equal(back, *g) || back.method_id != g->method_id ||
                corpus::serialize_graph(back) != corpus::serialize_graph(*g)) {
                fail(k, "serialization round trip");
            }
        }
        failed_methods += failures.size() != before;
    }
    const double secs = seconds_since(start);
    std::string detail = std::to_string(kInvariantMethods) + " methods, " + std::to_string(failed_methods) +
                         " violating, " + fmt(secs, 3) + " s < " + fmt(kInvariantBudgetSeconds) + " s";
    for (const auto& f : failures) detail += "; " + f;
    return {failed_methods == 0 && secs < kInvariantBudgetSeconds, detail};
}

// ---------------------------------------------------------------- random baseline

Outcome random_baseline() {
    task::LinkQuery proto{0, EdgeType::Dep, 1, {}};
    for (int v = 2; v < 1000; ++v) proto.candidates.push_back(v);
    const std::vector<task::LinkQuery> queries(kBaselineQueries, proto);
    Rng rng(2718);
    const auto m = task::link_eval(
        queries,
        [&](const std::vector<int>& s, const std::vector<EdgeType>&, const std::vector<int>&) {
            std::vector<double> out(s.size());
            for (double& x : out) x = rng.uniform();
            return out;
        },
        200, 5);
    const double e1 = 1.0 / 201, e3 = 3.0 / 201, e10 = 10.0 / 201;
    const bool ok = std::abs(m.hit1 - e1) <= kBaselineTolerance && std::abs(m.hit3 - e3) <= kBaselineTolerance &&
                    std::abs(m.hit10 - e10) <= kBaselineTolerance;
    return {ok, std::to_string(m.queries) + " queries, Hit@1/3/10 = " + fmt(m.hit1) + "/" + fmt(m.hit3) + "/" +
                    fmt(m.hit10) + " vs " + fmt(e1) + "/" + fmt(e3) + "/" + fmt(e10) + " within " +
                    fmt(kBaselineTolerance)};
}

// ---------------------------------------------------------------- shared training helpers

pretrain::PretrainConfig pretrain_config(std::uint64_t seed) {
    pretrain::PretrainConfig c;
    c.hidden = kDim;
    c.layers = 2;
    c.dropout = 0.2;
    c.epochs = 30;
    c.batch_size = 16;
    c.lr = 1e-2;
    c.seed = seed;
    return c;
}

embed::SubwordConfig subword_config() {
    embed::SubwordConfig sw;
    sw.dim = kDim;
    return sw;
}

std::vector<int> train_ids(const corpus::Corpus& c) {
    if (!c.splits.empty()) return c.graphs_in(corpus::Split::Train);
    std::vector<int> ids(c.graphs.size());
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

struct Trained {
    pretrain::PreparedCorpus prepared;
    pretrain::EncoderState state;
};

Trained encoder(const corpus::Corpus& c, std::uint64_t seed, bool pretrained) {
    Trained t;
    const auto cfg = pretrain_config(seed);
    t.prepared = pretrain::prepare_corpus(c, embed::SubwordEmbedder(subword_config()));
    t.state = pretrain::make_encoder_state(subword_config(), cfg.rgcn(kDim), t.prepared.global_init, seed);
    if (pretrained) pretrain::pretrain_run(t.prepared, train_ids(c), cfg, t.state);
    return t;
}

task::LinkConfig link_config(std::uint64_t seed) {
    task::LinkConfig c;
    c.scorer = task::ScorerKind::Mlp;
    c.seed = seed;
    return c;
}

// ---------------------------------------------------------------- score separation

Outcome score_separation() {
    const auto start = std::chrono::steady_clock::now();
    auto c = fixture(200, 10, 77, graph::Flavor::Sigma1);
    c.splits = corpus::split_corpus(c, {}, 77);
    auto t = encoder(c, 77, true);
    const auto r = task::finetune_link(c, t.state, link_config(77));
    const auto& m = r.metrics;
    const double secs = seconds_since(start);
    const bool ok = m.pos.mean > m.neg.mean && m.welch.p < kSeparationP && secs < kSeparationBudgetSeconds;
    return {ok, "positive " + fmt(m.pos.mean, 3) + " +- " + fmt(m.pos.stddev, 3) + " (n=" + std::to_string(m.pos.n) +
                    ") vs negative " + fmt(m.neg.mean, 3) + " +- " + fmt(m.neg.stddev, 3) + " (n=" +
                    std::to_string(m.neg.n) + "), Welch p = " + fmt(m.welch.p, 3) + " < " + fmt(kSeparationP) +
                    ", MRR " + fmt(m.mrr, 3) + ", " + fmt(secs, 3) + " s < " + fmt(kSeparationBudgetSeconds) + " s"};
}

// ---------------------------------------------------------------- pre-training benefit

task::NameConfig name_config(std::uint64_t seed) {
    task::NameConfig c;
    c.epochs = 30;
    c.seed = seed;
    return c;
}

Outcome pretraining_benefit() {
    int wins = 0;
    std::string scores;
    for (int s = 0; s < kDirectionalSeeds; ++s) {
        const auto seed = static_cast<std::uint64_t>(100 + s);
        auto c = fixture(120, 6, seed, graph::Flavor::Sigma1);
        c.splits = corpus::split_corpus(c, {}, seed);
        auto random_init = encoder(c, seed, false);
        auto pretrained = encoder(c, seed, true);
        const double f_rand = task::finetune_name(c, random_init.prepared, random_init.state, name_config(seed)).test.f1;
        const double f_pre = task::finetune_name(c, pretrained.prepared, pretrained.state, name_config(seed)).test.f1;
        wins += f_pre >= f_rand;
        scores += " " + fmt(f_pre, 3) + "/" + fmt(f_rand, 3);
    }
    return {wins >= kDirectionalWins, "pretrained >= random test F1 in " + std::to_string(wins) + "/" +
                                          std::to_string(kDirectionalSeeds) + " seeds (need " +
                                          std::to_string(kDirectionalWins) + "); pretrained/random:" + scores};
}

// ---------------------------------------------------------------- sigma1 vs sigma0

Outcome sigma1_over_sigma0() {
    int wins = 0;
    std::string scores;
    for (int s = 0; s < kDirectionalSeeds; ++s) {
        const auto seed = static_cast<std::uint64_t>(200 + s);
        double mrr[2];
        for (int f = 0; f < 2; ++f) {
            auto c = fixture(120, 6, seed, f == 0 ? graph::Flavor::Sigma0 : graph::Flavor::Sigma1);
            c.splits = corpus::split_corpus(c, {}, seed);
            auto t = encoder(c, seed, true);
            mrr[f] = task::finetune_link(c, t.state, link_config(seed)).metrics.mrr;
        }
        wins += mrr[1] >= mrr[0];
        scores += " " + fmt(mrr[1], 3) + "/" + fmt(mrr[0], 3);
    }
    return {wins >= kDirectionalWins, "sigma1 >= sigma0 link MRR in " + std::to_string(wins) + "/" +
                                          std::to_string(kDirectionalSeeds) + " seeds (need " +
                                          std::to_string(kDirectionalWins) + "); sigma1/sigma0:" + scores};
}

// ---------------------------------------------------------------- trainability

Outcome trainability() {
    const auto c = fixture(50, 1, 5, graph::Flavor::Sigma1);
    auto t = encoder(c, 5, false);
    auto cfg = name_config(5);
    cfg.epochs = kOverfitEpochs;
    cfg.lr = 1e-2;
    cfg.l2 = 0.0;
    const auto r = task::finetune_name(c, t.prepared, t.state, cfg);
    return {r.train.f1 >= kOverfitF1, "50 methods, " + std::to_string(kOverfitEpochs) + " epochs, training F1 " +
                                          fmt(r.train.f1) + " >= " + fmt(kOverfitF1) + " (exact " +
                                          std::to_string(r.train.exact) + "/50)"};
}

// ---------------------------------------------------------------- determinism

std::vector<std::string> cli_pipeline(const fs::path& out) {
    const fs::path src = fs::path(CODEGRAPH_FIXTURE_DIR) / "sample";
    const std::string o = out.string();
    const std::vector<std::vector<std::string>> steps = {
        {"build", "--source", src.string(), "--out", o, "--seed", "3"},
        {"pretrain", "--out", o, "--seed", "3"},
        {"finetune", "--task", "name", "--out", o, "--checkpoint", o + "/encoder.ckpt", "--seed", "3"},
        {"finetune", "--task", "link", "--out", o, "--checkpoint", o + "/encoder.ckpt", "--seed", "3"},
        {"eval", "--task", "name", "--out", o, "--seed", "3"},
        {"eval", "--task", "link", "--out", o, "--seed", "3"}};
    for (auto args : steps) {
        args.insert(args.begin(), "codegraph");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream sink, err;
        if (cli::run(static_cast<int>(argv.size()), argv.data(), sink, err) != 0) {
            throw Error(args[1] + " failed: " + err.str());
        }
    }
    std::vector<std::string> records;
    for (const char* f : {"name-metrics.json", "link-metrics.json", "name-eval-test.json", "link-eval-test.json"}) {
        records.push_back(corpus::read_file(out / f));
    }
    records.push_back(corpus::read_file(out / "pretrain-log.jsonl"));
    return records;
}

Outcome determinism() {
    const fs::path base = fs::temp_directory_path() / "codegraph-acceptance";
    fs::remove_all(base);
    const auto start = std::chrono::steady_clock::now();
    const auto a = cli_pipeline(base / "a");
    const double secs = seconds_since(start);
    const auto b = cli_pipeline(base / "b");
    std::size_t bytes = 0;
    for (const auto& r : a) bytes += r.size();
    return {a == b, std::to_string(a.size()) + " records (" + std::to_string(bytes) + " bytes) byte-identical: " +
                        (a == b ? "yes" : "no") + "; one pipeline run " + fmt(secs, 3) + " s"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"gradient-suite", gradient_suite},
        {"motif-oracle", motif_oracle},
        {"graph-invariants", graph_invariants},
        {"random-baseline", random_baseline},
        {"score-separation", score_separation},
        {"pretraining-benefit", pretraining_benefit},
        {"sigma1-over-sigma0", sigma1_over_sigma0},
        {"trainability", trainability},
        {"determinism", determinism},
    };
    std::vector<std::string> filters(argv + 1, argv + argc);
    int failed = 0;
    for (const auto& [key, fn] : criteria) {
        if (!filters.empty() &&
            std::none_of(filters.begin(), filters.end(), [&](const std::string& f) { return key.find(f) != std::string::npos; })) {
            continue;
        }
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << key << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
