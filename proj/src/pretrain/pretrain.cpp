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

#include "codegraph/pretrain/pretrain.hpp"

#include <cmath>
#include <sstream>

namespace codegraph::pretrain {

using nn::Mat;
using nn::Tensor;

void PretrainConfig::validate() const {
    weights.validate();
    if (!(lr > 0)) throw ConfigError("lr must be positive");
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (walks_per_node < 1) throw ConfigError("walks_per_node must be at least 1");
    if (negatives < 1) throw ConfigError("negatives must be at least 1");
    if (metapaths.empty()) throw EmptyMetapathSet("no metapaths configured");
    for (const auto& mp : metapaths) {
        if (mp.empty()) throw EmptyMetapathSet("empty metapath");
        for (auto t : mp) {
            if (t == graph::EdgeType::Virtual) throw ConfigError("metapaths may not use the virtual edge type");
        }
    }
    if (dropout < 0 || dropout >= 1) throw ConfigError("dropout must be in [0, 1)");
    if (l2 < 0) throw ConfigError("l2 must be non-negative");
    if (hidden < 1 || layers < 0 || mt_hidden < 1) throw ConfigError("hidden, layers and mt_hidden out of range");
}

nn::RgcnConfig PretrainConfig::rgcn(int in_dim) const {
    nn::RgcnConfig c;
    c.in_dim = in_dim;
    c.hidden = hidden;
    c.layers = layers;
    c.dropout = dropout;
    return c;
}

PreparedGraph prepare_graph(const graph::SigmaGraph& g, const embed::SubwordEmbedder& embedder,
                            const Mat& global_init, const corpus::TyingIndex& tying) {
    PreparedGraph p;
    p.graph = g.has_inverse_edges() ? g : embed::add_inverse_edges(g);
    p.features = embed::node_init_features(p.graph, embedder, global_init);
    p.motif_targets = motif_targets(count_motifs_all(g.num_nodes(), g.edges));
    p.weak_feature.resize(g.nodes.size());
    for (std::size_t v = 0; v < g.nodes.size(); ++v) {
        const auto& n = g.nodes[v];
        if (!corpus::is_strict_feature(n.feature, n.ntype) && tying.is_weak(n.feature)) p.weak_feature[v] = n.feature;
    }
    return p;
}

PreparedCorpus prepare_corpus(const corpus::Corpus& corpus, const embed::SubwordEmbedder& embedder) {
    PreparedCorpus pc;
    pc.global_init = embed::initial_global_embeddings(embedder);
    pc.graphs.reserve(corpus.graphs.size());
    for (const auto& g : corpus.graphs) pc.graphs.push_back(prepare_graph(g, embedder, pc.global_init, corpus.tying));
    return pc;
}

namespace {

std::string fmt_double(double d) {
    std::ostringstream s;
    s.precision(17);
    s << d;
    return s.str();
}

std::map<std::string, std::string> encoder_manifest(const embed::SubwordConfig& sw, const nn::RgcnConfig& rc) {
    return {{"format", "codegraph-encoder"},
            {"subword.dim", std::to_string(sw.dim)},
            {"subword.buckets", std::to_string(sw.buckets)},
            {"subword.min_n", std::to_string(sw.min_n)},
            {"subword.max_n", std::to_string(sw.max_n)},
            {"subword.seed", std::to_string(sw.seed)},
            {"rgcn.hidden", std::to_string(rc.hidden)},
            {"rgcn.layers", std::to_string(rc.layers)},
            {"rgcn.dropout", fmt_double(rc.dropout)},
            {"rgcn.self_loop", rc.self_loop ? "1" : "0"}};
}

const std::string& need(const std::map<std::string, std::string>& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) throw nn::CheckpointError("checkpoint manifest lacks '" + key + "'");
    return it->second;
}

template <typename T>
T parse_num(const std::map<std::string, std::string>& m, const std::string& key) {
    const std::string& s = need(m, key);
    std::istringstream in(s);
    T v{};
    in >> v;
    if (!in || !in.eof()) throw nn::CheckpointError("bad manifest value for '" + key + "': " + s);
    return v;
}

}  // namespace

EncoderState make_encoder_state(const embed::SubwordConfig& subword, const nn::RgcnConfig& rgcn,
                                const Mat& global_init, std::uint64_t seed) {
    if (rgcn.in_dim != subword.dim) throw ConfigError("encoder input width must equal the subword dimension");
    EncoderState s;
    Rng rng(seed);
    s.encoder = nn::RgcnEncoder(rgcn, global_init, *s.store, rng, "enc");
    s.subword = subword;
    s.manifest = encoder_manifest(subword, rgcn);
    return s;
}

EncoderState encoder_from_checkpoint(const nn::Checkpoint& ckpt) {
    const auto& m = ckpt.manifest;
    if (need(m, "format") != "codegraph-encoder") throw nn::CheckpointError("not an encoder checkpoint");
    embed::SubwordConfig sw;
    sw.dim = parse_num<int>(m, "subword.dim");
    sw.buckets = parse_num<std::uint64_t>(m, "subword.buckets");
    sw.min_n = parse_num<int>(m, "subword.min_n");
    sw.max_n = parse_num<int>(m, "subword.max_n");
    sw.seed = parse_num<std::uint64_t>(m, "subword.seed");
    nn::RgcnConfig rc;
    rc.in_dim = sw.dim;
    rc.hidden = parse_num<int>(m, "rgcn.hidden");
    rc.layers = parse_num<int>(m, "rgcn.layers");
    rc.dropout = parse_num<double>(m, "rgcn.dropout");
    rc.self_loop = need(m, "rgcn.self_loop") == "1";
    if (sw.dim < 1 || rc.hidden < 1 || rc.layers < 0) throw nn::CheckpointError("manifest dimensions out of range");
    auto g = ckpt.tensors.find("enc.global");
    if (g == ckpt.tensors.end()) throw nn::CheckpointError("checkpoint lacks tensor 'enc.global'");
    EncoderState s = make_encoder_state(sw, rc, g->second, 0);
    nn::restore(*s.store, ckpt, "enc.");
    s.manifest = m;
    return s;
}

void save_encoder(const std::filesystem::path& path, const EncoderState& state) {
    nn::Checkpoint c = nn::snapshot(*state.store, "enc.");
    c.manifest = state.manifest;
    nn::save_checkpoint(path, c);
}

EncoderState load_encoder(const std::filesystem::path& path) {
    const nn::Checkpoint c = nn::load_checkpoint(path);
    try {
        return encoder_from_checkpoint(c);
    } catch (const nn::CheckpointError& e) {
        throw nn::CheckpointError(path.string() + ": " + e.what());
    }
}

nn::GraphBatch make_prepared_batch(const PreparedCorpus& corpus, const std::vector<int>& ids, bool add_virtual_nodes) {
    std::vector<const graph::SigmaGraph*> gs;
    std::vector<const embed::NodeInitFeatures*> fs;
    for (int id : ids) {
        gs.push_back(&corpus.graphs.at(static_cast<std::size_t>(id)).graph);
        fs.push_back(&corpus.graphs[static_cast<std::size_t>(id)].features);
    }
    return nn::make_batch(gs, fs, add_virtual_nodes);
}

namespace {

struct Heads {
    DiagonalMap diag;
    Tensor him_w;
    nn::Mlp mt;
};

Heads ensure_heads(EncoderState& state, const PretrainConfig& config, Rng& rng) {
    nn::ParamStore& store = *state.store;
    const int d = state.encoder.out_dim();
    Heads h;
    if (store.contains("him.w")) {
        for (int a = 0; a < graph::kNumNodeTypes; ++a) {
            for (int b = 0; b < graph::kNumNodeTypes; ++b) {
                const auto ta = static_cast<graph::NodeType>(a), tb = static_cast<graph::NodeType>(b);
                h.diag.emplace(TypePair{ta, tb}, store.get("mrw." + std::string(graph::to_string(ta)) + "." +
                                                           std::string(graph::to_string(tb))));
            }
        }
        h.him_w = store.get("him.w");
        h.mt = nn::Mlp::attach(store, "mt");
        return h;
    }
    h.diag = make_diagonals(store, d, "mrw");
    h.him_w = store.add("him.w", nn::glorot(d, d, rng));
    h.mt = nn::Mlp(store, "mt", d, config.mt_hidden, kNumMotifs, rng);
    return h;
}

std::vector<int> shuffled_rows(const nn::GraphBatch& batch, bool per_type, Rng& rng) {
    const int n = batch.num_nodes;
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[i] = i;
    const int real = batch.real_nodes();
    if (!per_type) {
        std::vector<int> head(perm.begin(), perm.begin() + real);
        rng.shuffle(head);
        std::copy(head.begin(), head.end(), perm.begin());
        return perm;
    }
    std::array<std::vector<int>, graph::kNumNodeTypes> by_type;
    for (int i = 0; i < real; ++i) by_type[graph::index_of(batch.ntype[i])].push_back(i);
    for (auto& rows : by_type) {
        std::vector<int> shuffled = rows;
        rng.shuffle(shuffled);
        for (std::size_t k = 0; k < rows.size(); ++k) perm[rows[k]] = shuffled[k];
    }
    return perm;
}

std::string describe(const StepRecord& r) {
    std::ostringstream s;
    s << "non-finite pretraining loss at step " << r.step << " (epoch " << r.epoch << "): mrw=" << r.loss[0]
      << " him=" << r.loss[1] << " mt=" << r.loss[2] << " nt=" << r.loss[3] << " total=" << r.total;
    return s.str();
}

}  // namespace

PretrainResult pretrain_run(const PreparedCorpus& corpus, const std::vector<int>& graph_ids,
                            const PretrainConfig& config, EncoderState& state, const PretrainOptions& options) {
    config.validate();
    Rng master(config.seed);
    Rng head_rng = master.fork(1);
    Heads heads = ensure_heads(state, config, head_rng);

    nn::AdamConfig ac;
    ac.lr = config.lr;
    ac.weight_decay = config.l2;
    nn::Adam adam(ac);

    MrwConfig mrw;
    mrw.metapaths = config.metapaths;
    mrw.walks_per_node = config.walks_per_node;
    mrw.negatives = config.negatives;
    const auto& omega = config.weights.omega;

    PretrainResult result;
    long step = 0;
    std::vector<int> order = graph_ids;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        Rng epoch_rng = master.fork(1000 + static_cast<std::uint64_t>(epoch));
        epoch_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(config.batch_size)) {
            if (options.max_steps > 0 && step >= options.max_steps) break;
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const std::vector<int> ids(order.begin() + static_cast<std::ptrdiff_t>(start),
                                       order.begin() + static_cast<std::ptrdiff_t>(stop));
            Rng rng = master.fork(1000000 + static_cast<std::uint64_t>(step));
            const nn::GraphBatch batch = make_prepared_batch(corpus, ids);
            const int real = batch.real_nodes();
            const std::vector<graph::NodeType> ntype(batch.ntype.begin(), batch.ntype.begin() + real);

            const Tensor x = state.encoder.input(batch);
            const Tensor h = state.encoder.forward_from(x, batch, true, rng);
            std::array<Tensor, 4> losses;

            if (omega[0] > 0) {
                auto pairs = walk_pairs(sample_metapath_walks(batch.num_nodes, batch.edges, mrw, rng));
                auto neg = sample_negatives(pairs, ntype, mrw.negatives, rng);
                pairs.insert(pairs.end(), neg.begin(), neg.end());
                losses[0] = mrw_loss(pairs, h, ntype, heads.diag);
            }
            if (omega[1] > 0) {
                const Tensor xs = nn::gather_rows(x, shuffled_rows(batch, config.him_per_type_shuffle, rng));
                const Tensor hc = state.encoder.forward_from(xs, batch, true, rng);
                losses[1] = him_loss(h, hc, heads.him_w, ntype);
            }
            if (omega[2] > 0) {
                Mat targets(real, kNumMotifs);
                for (std::size_t g = 0; g < ids.size(); ++g) {
                    const Mat& t = corpus.graphs[static_cast<std::size_t>(ids[g])].motif_targets;
                    targets.middleRows(batch.offset[g], t.rows()) = t;
                }
                losses[2] = mt_loss(h, targets, heads.mt);
            }
            if (omega[3] > 0) {
                std::map<std::string, std::vector<int>> members;
                for (std::size_t g = 0; g < ids.size(); ++g) {
                    const auto& wf = corpus.graphs[static_cast<std::size_t>(ids[g])].weak_feature;
                    for (std::size_t v = 0; v < wf.size(); ++v) {
                        if (!wf[v].empty()) members[wf[v]].push_back(batch.offset[g] + static_cast<int>(v));
                    }
                }
                std::vector<std::vector<int>> groups;
                for (auto& [f, rows] : members) groups.push_back(std::move(rows));
                losses[3] = nt_loss(h, groups, config.nt_stop_gradient);
            }

            Tensor total = combined_loss(losses, config.weights);
            StepRecord rec;
            rec.step = step;
            rec.epoch = epoch;
            for (int i = 0; i < 4; ++i) rec.loss[i] = losses[i].defined() ? losses[i].item() : 0.0;
            rec.total = total.item();
            if (!std::isfinite(rec.total)) throw NonFiniteLoss(describe(rec));

            state.store->zero_grad();
            total.backward();
            adam.step(*state.store);
            result.log.push_back(rec);
            if (options.on_step) options.on_step(rec);
            ++step;
        }
        if (!options.checkpoint_dir.empty()) {
            nn::Checkpoint c = nn::snapshot(*state.store);
            c.manifest = state.manifest;
            nn::save_checkpoint(options.checkpoint_dir / ("epoch-" + std::to_string(epoch + 1) + ".ckpt"), c);
        }
        if (options.max_steps > 0 && step >= options.max_steps) break;
    }
    return result;
}

}  // namespace codegraph::pretrain
