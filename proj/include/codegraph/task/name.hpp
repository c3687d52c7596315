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
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "codegraph/corpus/corpus.hpp"
#include "codegraph/nn/checkpoint.hpp"
#include "codegraph/nn/modules.hpp"
#include "codegraph/nn/rgcn.hpp"
#include "codegraph/pretrain/pretrain.hpp"

namespace codegraph::task {

inline constexpr int kMaxNameLength = 5;
inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";

class VocabNotBuilt : public Error {
public:
    using Error::Error;
};

class EmptyGraph : public Error {
public:
    using Error::Error;
};

/// Lowercased subtokens of the method name inside a method id, truncated
/// to kMaxNameLength.
std::vector<std::string> name_subtokens(std::string_view method_id);

/// Subtoken vocabulary; ids 0 and 1 are PAD and UNK.
class NameVocab {
public:
    NameVocab() = default;

    /// The `max_size` most frequent subtokens, ties broken lexicographically.
    static NameVocab build(const std::vector<std::vector<std::string>>& names, std::size_t max_size = 1000);
    /// One token per line, PAD and UNK first.
    static NameVocab parse(std::string_view text);
    std::string serialize() const;

    bool built() const { return !tokens_.empty(); }
    int size() const { return static_cast<int>(tokens_.size()); }
    int id_of(std::string_view subtoken) const;
    const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }

    /// kMaxNameLength ids, PAD-filled.
    std::vector<int> encode(const std::vector<std::string>& subtokens) const;

private:
    void reindex();

    std::vector<std::string> tokens_;
    std::map<std::string, int, std::less<>> index_;
};

enum class PoolingKind { Average, VirtualNode, Attention };
std::string_view to_string(PoolingKind k);
PoolingKind parse_pooling(std::string_view s);

/// Graph read-out. Attention pooling: sum_v softmax_v(h_v a) (h_v P) with a
/// learned gate `a` (d x 1) and projection `P` (d x d).
class Pooler {
public:
    Pooler() = default;
    Pooler(PoolingKind kind, int dim, nn::ParamStore& store, Rng& rng, const std::string& prefix = "name.pool");
    static Pooler attach(PoolingKind kind, const nn::ParamStore& store, const std::string& prefix = "name.pool");

    PoolingKind kind() const { return kind_; }
    /// One row per graph of the batch. Virtual-node pooling requires the
    /// batch to carry virtual nodes.
    nn::Tensor pool(const nn::Tensor& h, const nn::GraphBatch& batch) const;
    /// Attention weights of the real nodes (n x 1).
    nn::Tensor attention(const nn::Tensor& h, const nn::GraphBatch& batch) const;

private:
    PoolingKind kind_ = PoolingKind::Average;
    nn::Tensor gate_, proj_;
};

/// Five independent affine classifiers, d -> |vocab|.
class NameHead {
public:
    NameHead() = default;
    NameHead(int dim, int vocab_size, nn::ParamStore& store, Rng& rng, const std::string& prefix = "name.cls");
    static NameHead attach(const nn::ParamStore& store, const std::string& prefix = "name.cls");

    std::array<nn::Tensor, kMaxNameLength> logits(const nn::Tensor& pooled) const;

    std::array<nn::Tensor, kMaxNameLength> w, b;
};

/// Sum over positions of the cross-entropy against PAD-padded targets
/// (one row of kMaxNameLength ids per graph).
nn::Tensor name_loss(const std::array<nn::Tensor, kMaxNameLength>& logits, const std::vector<std::vector<int>>& targets);

/// Argmax per position for every row, cut at the first PAD.
std::vector<std::vector<std::string>> decode_names(const std::array<nn::Tensor, kMaxNameLength>& logits,
                                                   const NameVocab& vocab);

struct NameMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    /// Micro-average ingredients.
    long matched = 0;
    long predicted = 0;
    long gold = 0;
    long methods = 0;
    long exact = 0;

    void add(const std::vector<std::string>& pred, const std::vector<std::string>& gold_tokens);
    /// Recomputes precision, recall and F1 from the counts.
    void finish();
};

/// Multiset overlap metrics of one prediction; UNK never earns credit.
NameMetrics name_metrics(const std::vector<std::string>& pred, const std::vector<std::string>& gold);

struct NameConfig {
    int epochs = 100;
    double lr = 1e-3;
    double l2 = 1e-4;
    int batch_size = 32;
    PoolingKind pooling = PoolingKind::Attention;
    bool freeze_encoder = false;
    std::size_t vocab_size = 1000;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Vocabulary, pooling and classifiers with their own parameter store.
struct NameModel {
    NameVocab vocab;
    PoolingKind pooling = PoolingKind::Attention;
    std::unique_ptr<nn::ParamStore> store = std::make_unique<nn::ParamStore>();
    Pooler pooler;
    NameHead head;

    NameModel() = default;
    NameModel(NameVocab v, PoolingKind kind, int dim, std::uint64_t seed);
};

nn::Checkpoint name_model_checkpoint(const NameModel& model);
NameModel name_model_from_checkpoint(const nn::Checkpoint& ckpt);

struct NameEpoch {
    int epoch = 0;
    double train_loss = 0.0;
    double valid_f1 = 0.0;
};

struct NameResult {
    NameModel model;
    int best_epoch = 0;
    NameMetrics train, valid, test;
    std::vector<NameEpoch> log;
};

/// Predicted names for the listed graphs (encoder in eval mode).
std::vector<std::vector<std::string>> predict_names(const pretrain::PreparedCorpus& corpus,
                                                    const std::vector<int>& ids, const pretrain::EncoderState& state,
                                                    const NameModel& model, int batch_size = 32);

NameMetrics evaluate_names(const pretrain::PreparedCorpus& prepared, const std::vector<int>& ids,
                           const pretrain::EncoderState& state, const NameModel& model, int batch_size = 32);

/// Trains a name model on the training split (all graphs when the corpus has
/// no split), selecting the epoch with the best validation F1. Unless the
/// encoder is frozen its parameters in `state` are updated in place and end
/// at the selected epoch.
NameResult finetune_name(const corpus::Corpus& corpus, const pretrain::PreparedCorpus& prepared,
                         pretrain::EncoderState& state, const NameConfig& config);

/// The core loop with an explicit vocabulary and graph lists.
NameResult finetune_name(const pretrain::PreparedCorpus& prepared, const std::vector<std::string>& method_ids,
                         const std::vector<int>& train, const std::vector<int>& valid, const std::vector<int>& test,
                         NameVocab vocab, pretrain::EncoderState& state, const NameConfig& config);

}  // namespace codegraph::task
