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

#include "codegraph/task/name.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "codegraph/corpus/build.hpp"
#include "codegraph/embed/embed.hpp"

namespace codegraph::task {

using nn::Mat;
using nn::Tensor;

std::vector<std::string> name_subtokens(std::string_view method_id) {
    auto toks = embed::subtokenize_name(corpus::method_name_of(method_id));
    if (toks.size() > static_cast<std::size_t>(kMaxNameLength)) toks.resize(kMaxNameLength);
    return toks;
}

NameVocab NameVocab::build(const std::vector<std::vector<std::string>>& names, std::size_t max_size) {
    std::map<std::string, long> freq;
    for (const auto& n : names) {
        for (const auto& t : n) {
            if (t != kPadToken && t != kUnkToken) ++freq[t];
        }
    }
    std::vector<std::pair<std::string, long>> ranked(freq.begin(), freq.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > max_size) ranked.resize(max_size);
    NameVocab v;
    v.tokens_ = {std::string(kPadToken), std::string(kUnkToken)};
    for (auto& [t, c] : ranked) v.tokens_.push_back(t);
    v.reindex();
    return v;
}

NameVocab NameVocab::parse(std::string_view text) {
    NameVocab v;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        v.tokens_.emplace_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    if (v.tokens_.size() < 2 || v.tokens_[0] != kPadToken || v.tokens_[1] != kUnkToken) {
        throw ConfigError("vocabulary must start with " + std::string(kPadToken) + " and " + std::string(kUnkToken));
    }
    v.reindex();
    if (v.index_.size() + 2 != v.tokens_.size()) throw ConfigError("vocabulary lists a token twice");
    return v;
}

std::string NameVocab::serialize() const {
    std::string out;
    for (const auto& t : tokens_) out += t + "\n";
    return out;
}

void NameVocab::reindex() {
    index_.clear();
    for (std::size_t i = 2; i < tokens_.size(); ++i) index_.emplace(tokens_[i], static_cast<int>(i));
}

int NameVocab::id_of(std::string_view subtoken) const {
    if (!built()) throw VocabNotBuilt("vocabulary has not been built");
    auto it = index_.find(subtoken);
    return it == index_.end() ? kUnkId : it->second;
}

std::vector<int> NameVocab::encode(const std::vector<std::string>& subtokens) const {
    std::vector<int> ids(kMaxNameLength, kPadId);
    for (std::size_t i = 0; i < subtokens.size() && i < ids.size(); ++i) ids[i] = id_of(subtokens[i]);
    return ids;
}

std::string_view to_string(PoolingKind k) {
    switch (k) {
        case PoolingKind::Average: return "average";
        case PoolingKind::VirtualNode: return "virtual_node";
        case PoolingKind::Attention: return "attention";
    }
    return "?";
}

PoolingKind parse_pooling(std::string_view s) {
    if (s == "average") return PoolingKind::Average;
    if (s == "virtual_node") return PoolingKind::VirtualNode;
    if (s == "attention") return PoolingKind::Attention;
    throw ConfigError("unknown pooling '" + std::string(s) + "' (expected average, virtual_node or attention)");
}

Pooler::Pooler(PoolingKind kind, int dim, nn::ParamStore& store, Rng& rng, const std::string& prefix) : kind_(kind) {
    if (kind == PoolingKind::Attention) {
        gate_ = store.add(prefix + ".gate", nn::glorot(dim, 1, rng));
        proj_ = store.add(prefix + ".proj", nn::glorot(dim, dim, rng));
    }
}

Pooler Pooler::attach(PoolingKind kind, const nn::ParamStore& store, const std::string& prefix) {
    Pooler p;
    p.kind_ = kind;
    if (kind == PoolingKind::Attention) {
        p.gate_ = store.get(prefix + ".gate");
        p.proj_ = store.get(prefix + ".proj");
    }
    return p;
}

namespace {

std::vector<int> real_rows(const nn::GraphBatch& batch) {
    std::vector<int> rows(static_cast<std::size_t>(batch.real_nodes()));
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
    return rows;
}

std::vector<int> real_segments(const nn::GraphBatch& batch) {
    for (int g = 0; g < batch.num_graphs; ++g) {
        if (batch.offset[g + 1] == batch.offset[g]) throw EmptyGraph("graph " + std::to_string(g) + " has no nodes");
    }
    return {batch.node_graph.begin(), batch.node_graph.begin() + batch.real_nodes()};
}

}  // namespace

Tensor Pooler::attention(const Tensor& h, const nn::GraphBatch& batch) const {
    const auto seg = real_segments(batch);
    const Tensor hr = h.rows() == batch.real_nodes() ? h : nn::gather_rows(h, real_rows(batch));
    return nn::segment_softmax(nn::matmul(hr, gate_), seg, batch.num_graphs);
}

Tensor Pooler::pool(const Tensor& h, const nn::GraphBatch& batch) const {
    const auto seg = real_segments(batch);
    switch (kind_) {
        case PoolingKind::Average: {
            const Tensor hr = h.rows() == batch.real_nodes() ? h : nn::gather_rows(h, real_rows(batch));
            return nn::segment_mean(hr, seg, batch.num_graphs);
        }
        case PoolingKind::VirtualNode:
            if (static_cast<int>(batch.virtual_node.size()) != batch.num_graphs) {
                throw ConfigError("virtual-node pooling needs a batch with virtual nodes");
            }
            return nn::gather_rows(h, batch.virtual_node);
        case PoolingKind::Attention: {
            const Tensor hr = h.rows() == batch.real_nodes() ? h : nn::gather_rows(h, real_rows(batch));
            const Tensor alpha = nn::segment_softmax(nn::matmul(hr, gate_), seg, batch.num_graphs);
            return nn::scatter_add_rows(nn::mul_colvec(nn::matmul(hr, proj_), alpha), seg, batch.num_graphs);
        }
    }
    throw InternalError("unknown pooling kind");
}

NameHead::NameHead(int dim, int vocab_size, nn::ParamStore& store, Rng& rng, const std::string& prefix) {
    for (int i = 0; i < kMaxNameLength; ++i) {
        const std::string p = prefix + std::to_string(i);
        w[i] = store.add(p + ".w", nn::glorot(dim, vocab_size, rng));
        b[i] = store.add(p + ".b", Mat::Zero(1, vocab_size));
    }
}

NameHead NameHead::attach(const nn::ParamStore& store, const std::string& prefix) {
    NameHead h;
    for (int i = 0; i < kMaxNameLength; ++i) {
        const std::string p = prefix + std::to_string(i);
        h.w[i] = store.get(p + ".w");
        h.b[i] = store.get(p + ".b");
    }
    return h;
}

std::array<Tensor, kMaxNameLength> NameHead::logits(const Tensor& pooled) const {
    std::array<Tensor, kMaxNameLength> out;
    for (int i = 0; i < kMaxNameLength; ++i) out[i] = nn::add_rowvec(nn::matmul(pooled, w[i]), b[i]);
    return out;
}

Tensor name_loss(const std::array<Tensor, kMaxNameLength>& logits, const std::vector<std::vector<int>>& targets) {
    Tensor total = Tensor::constant(Mat::Zero(1, 1));
    for (int i = 0; i < kMaxNameLength; ++i) {
        std::vector<int> col;
        col.reserve(targets.size());
        for (const auto& t : targets) col.push_back(t.at(static_cast<std::size_t>(i)));
        total = nn::add(total, nn::softmax_cross_entropy(logits[i], col));
    }
    return total;
}

std::vector<std::vector<std::string>> decode_names(const std::array<Tensor, kMaxNameLength>& logits,
                                                   const NameVocab& vocab) {
    if (!vocab.built()) throw VocabNotBuilt("vocabulary has not been built");
    const auto rows = logits[0].rows();
    std::vector<std::vector<std::string>> out(static_cast<std::size_t>(rows));
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (int i = 0; i < kMaxNameLength; ++i) {
            Eigen::Index best;
            logits[i].value().row(r).maxCoeff(&best);
            if (best == kPadId) break;
            out[r].push_back(vocab.token(static_cast<int>(best)));
        }
    }
    return out;
}

void NameMetrics::add(const std::vector<std::string>& pred, const std::vector<std::string>& gold_tokens) {
    std::map<std::string, long> want;
    for (const auto& g : gold_tokens) ++want[g];
    long c = 0;
    for (const auto& p : pred) {
        if (p == kUnkToken) continue;
        auto it = want.find(p);
        if (it != want.end() && it->second > 0) {
            --it->second;
            ++c;
        }
    }
    matched += c;
    predicted += static_cast<long>(pred.size());
    gold += static_cast<long>(gold_tokens.size());
    ++methods;
    if (c == static_cast<long>(pred.size()) && c == static_cast<long>(gold_tokens.size())) ++exact;
}

void NameMetrics::finish() {
    precision = predicted > 0 ? static_cast<double>(matched) / static_cast<double>(predicted) : 0.0;
    recall = gold > 0 ? static_cast<double>(matched) / static_cast<double>(gold) : 0.0;
    f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

NameMetrics name_metrics(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
    NameMetrics m;
    m.add(pred, gold);
    m.finish();
    return m;
}

void NameConfig::validate() const {
    if (epochs < 0) throw ConfigError("epochs must be non-negative");
    if (!(lr > 0)) throw ConfigError("lr must be positive");
    if (l2 < 0) throw ConfigError("l2 must be non-negative");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (vocab_size < 1) throw ConfigError("vocab_size must be at least 1");
}

NameModel::NameModel(NameVocab v, PoolingKind kind, int dim, std::uint64_t seed) : vocab(std::move(v)), pooling(kind) {
    if (!vocab.built()) throw VocabNotBuilt("vocabulary has not been built");
    Rng rng(seed);
    pooler = Pooler(kind, dim, *store, rng);
    head = NameHead(dim, vocab.size(), *store, rng);
}

nn::Checkpoint name_model_checkpoint(const NameModel& model) {
    nn::Checkpoint c = nn::snapshot(*model.store);
    c.manifest = {{"format", "codegraph-name-head"},
                  {"pooling", std::string(to_string(model.pooling))},
                  {"vocab", model.vocab.serialize()}};
    return c;
}

NameModel name_model_from_checkpoint(const nn::Checkpoint& ckpt) {
    auto get = [&](const std::string& k) {
        auto it = ckpt.manifest.find(k);
        if (it == ckpt.manifest.end()) throw nn::CheckpointError("name head manifest lacks '" + k + "'");
        return it->second;
    };
    if (get("format") != "codegraph-name-head") throw nn::CheckpointError("not a name head checkpoint");
    NameModel m;
    m.vocab = NameVocab::parse(get("vocab"));
    m.pooling = parse_pooling(get("pooling"));
    for (const auto& [name, value] : ckpt.tensors) m.store->add(name, value);
    try {
        m.pooler = Pooler::attach(m.pooling, *m.store);
        m.head = NameHead::attach(*m.store);
    } catch (const InternalError& e) {
        throw nn::CheckpointError(std::string("incomplete name head: ") + e.what());
    }
    if (m.head.w[0].cols() != m.vocab.size()) throw nn::CheckpointError("name head does not match its vocabulary");
    return m;
}

namespace {

std::vector<std::vector<int>> batches_of(const std::vector<int>& ids, int batch_size) {
    std::vector<std::vector<int>> out;
    for (std::size_t s = 0; s < ids.size(); s += static_cast<std::size_t>(batch_size)) {
        const std::size_t e = std::min(ids.size(), s + static_cast<std::size_t>(batch_size));
        out.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(s), ids.begin() + static_cast<std::ptrdiff_t>(e));
    }
    return out;
}

std::map<std::string, Mat> copy_values(const nn::ParamStore& store) {
    std::map<std::string, Mat> m;
    for (const auto& [k, t] : store.all()) m[k] = t.value();
    return m;
}

void put_values(const nn::ParamStore& store, const std::map<std::string, Mat>& values) {
    for (const auto& [k, t] : store.all()) {
        Tensor h = t;
        h.mutable_value() = values.at(k);
    }
}

}  // namespace

std::vector<std::vector<std::string>> predict_names(const pretrain::PreparedCorpus& corpus,
                                                    const std::vector<int>& ids, const pretrain::EncoderState& state,
                                                    const NameModel& model, int batch_size) {
    std::vector<std::vector<std::string>> out;
    Rng unused(0);
    for (const auto& b : batches_of(ids, batch_size)) {
        const auto batch = pretrain::make_prepared_batch(corpus, b, model.pooling == PoolingKind::VirtualNode);
        const Tensor h = state.encoder.forward(batch, false, unused);
        auto names = decode_names(model.head.logits(model.pooler.pool(h, batch)), model.vocab);
        for (auto& n : names) out.push_back(std::move(n));
    }
    return out;
}

NameMetrics evaluate_names(const pretrain::PreparedCorpus& prepared, const std::vector<int>& ids,
                           const pretrain::EncoderState& state, const NameModel& model, int batch_size) {
    NameMetrics m;
    const auto pred = predict_names(prepared, ids, state, model, batch_size);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        m.add(pred[i], name_subtokens(prepared.graphs[static_cast<std::size_t>(ids[i])].graph.method_id));
    }
    m.finish();
    return m;
}

NameResult finetune_name(const pretrain::PreparedCorpus& prepared, const std::vector<std::string>& method_ids,
                         const std::vector<int>& train, const std::vector<int>& valid, const std::vector<int>& test,
                         NameVocab vocab, pretrain::EncoderState& state, const NameConfig& config) {
    config.validate();
    if (!vocab.built()) throw VocabNotBuilt("vocabulary has not been built");
    Rng master(config.seed);
    NameResult result;
    result.model = NameModel(std::move(vocab), config.pooling, state.encoder.out_dim(), master.next());
    NameModel& model = result.model;

    nn::ParamStore trainable;
    for (const auto& [k, t] : model.store->all()) trainable.insert(k, t);
    if (!config.freeze_encoder) {
        for (const auto& [k, t] : state.store->all()) {
            if (k.rfind(state.encoder.prefix() + ".", 0) == 0) trainable.insert(k, t);
        }
    }
    nn::AdamConfig ac;
    ac.lr = config.lr;
    ac.weight_decay = config.l2;
    nn::Adam adam(ac);

    std::vector<std::vector<int>> targets(method_ids.size());
    for (int id : train) targets[id] = model.vocab.encode(name_subtokens(method_ids[id]));

    const bool virt = config.pooling == PoolingKind::VirtualNode;
    std::map<std::string, Mat> best = copy_values(trainable);
    double best_f1 = -1.0;
    std::vector<int> order = train;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        Rng epoch_rng = master.fork(static_cast<std::uint64_t>(epoch));
        epoch_rng.shuffle(order);
        double epoch_loss = 0.0;
        for (const auto& b : batches_of(order, config.batch_size)) {
            const auto batch = pretrain::make_prepared_batch(prepared, b, virt);
            Tensor h = state.encoder.forward(batch, !config.freeze_encoder, epoch_rng);
            if (config.freeze_encoder) h = nn::detach(h);
            std::vector<std::vector<int>> t;
            for (int id : b) t.push_back(targets[id]);
            Tensor loss = name_loss(model.head.logits(model.pooler.pool(h, batch)), t);
            if (!std::isfinite(loss.item())) throw pretrain::NonFiniteLoss("non-finite name loss in epoch " +
                                                                           std::to_string(epoch));
            trainable.zero_grad();
            state.store->zero_grad();
            loss.backward();
            adam.step(trainable);
            epoch_loss += loss.item();
        }
        NameEpoch rec{epoch, epoch_loss, 0.0};
        if (!valid.empty()) {
            rec.valid_f1 = evaluate_names(prepared, valid, state, model, config.batch_size).f1;
            if (rec.valid_f1 > best_f1) {
                best_f1 = rec.valid_f1;
                best = copy_values(trainable);
                result.best_epoch = epoch;
            }
        }
        result.log.push_back(rec);
    }
    if (valid.empty()) {
        result.best_epoch = config.epochs;
    } else {
        put_values(trainable, best);
    }
    if (!train.empty()) result.train = evaluate_names(prepared, train, state, model, config.batch_size);
    if (!valid.empty()) result.valid = evaluate_names(prepared, valid, state, model, config.batch_size);
    if (!test.empty()) result.test = evaluate_names(prepared, test, state, model, config.batch_size);
    return result;
}

NameResult finetune_name(const corpus::Corpus& corpus, const pretrain::PreparedCorpus& prepared,
                         pretrain::EncoderState& state, const NameConfig& config) {
    std::vector<int> train, valid, test;
    if (corpus.splits.empty()) {
        for (int i = 0; i < static_cast<int>(corpus.graphs.size()); ++i) train.push_back(i);
    } else {
        train = corpus.graphs_in(corpus::Split::Train);
        valid = corpus.graphs_in(corpus::Split::Valid);
        test = corpus.graphs_in(corpus::Split::Test);
    }
    std::vector<std::string> ids;
    std::vector<std::vector<std::string>> names;
    for (const auto& g : corpus.graphs) ids.push_back(g.method_id);
    for (int i : train) names.push_back(name_subtokens(ids[static_cast<std::size_t>(i)]));
    return finetune_name(prepared, ids, train, valid, test, NameVocab::build(names, config.vocab_size), state, config);
}

}  // namespace codegraph::task
