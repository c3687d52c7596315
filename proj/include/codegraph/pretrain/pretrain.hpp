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
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "codegraph/corpus/corpus.hpp"
#include "codegraph/embed/embed.hpp"
#include "codegraph/nn/checkpoint.hpp"
#include "codegraph/nn/modules.hpp"
#include "codegraph/nn/rgcn.hpp"
#include "codegraph/pretrain/signals.hpp"

namespace codegraph::pretrain {

class NonFiniteLoss : public Error {
public:
    using Error::Error;
};

struct PretrainConfig {
    LossWeights weights;
    double lr = 1e-3;
    int epochs = 10;
    int batch_size = 32;
    int walks_per_node = 2;
    int negatives = 5;
    std::vector<Metapath> metapaths = default_metapaths();
    double dropout = 0.2;
    double l2 = 1e-4;
    std::uint64_t seed = 0;
    int hidden = 300;
    int layers = 2;
    int mt_hidden = 64;
    bool nt_stop_gradient = false;
    /// Shuffle input rows within each node type instead of across the batch.
    bool him_per_type_shuffle = false;

    void validate() const;
    /// Encoder shape implied by this config for the given input width.
    nn::RgcnConfig rgcn(int in_dim) const;
};

/// A graph ready for the encoder: inverse edges added, input features and
/// motif targets computed once.
struct PreparedGraph {
    graph::SigmaGraph graph;
    embed::NodeInitFeatures features;
    nn::Mat motif_targets;
    /// Weak-tying feature of every node, empty for strict and untied nodes.
    std::vector<std::string> weak_feature;
};

struct PreparedCorpus {
    std::vector<PreparedGraph> graphs;
    nn::Mat global_init;
};

PreparedCorpus prepare_corpus(const corpus::Corpus& corpus, const embed::SubwordEmbedder& embedder);
PreparedGraph prepare_graph(const graph::SigmaGraph& g, const embed::SubwordEmbedder& embedder,
                            const nn::Mat& global_init, const corpus::TyingIndex& tying);

/// Encoder parameters (prefix "enc") plus the pre-training heads, and the
/// manifest that lets a checkpoint be reloaded.
struct EncoderState {
    std::unique_ptr<nn::ParamStore> store = std::make_unique<nn::ParamStore>();
    nn::RgcnEncoder encoder;
    embed::SubwordConfig subword;
    std::map<std::string, std::string> manifest;
};

/// Fresh encoder with Glorot weights and the given global-row initialization.
EncoderState make_encoder_state(const embed::SubwordConfig& subword, const nn::RgcnConfig& rgcn,
                                const nn::Mat& global_init, std::uint64_t seed);

/// Saves encoder parameters only.
void save_encoder(const std::filesystem::path& path, const EncoderState& state);
/// Rebuilds an encoder from a checkpoint written by save_encoder or
/// pretrain_run. Throws nn::CheckpointError on a missing or bad manifest.
EncoderState load_encoder(const std::filesystem::path& path);
EncoderState encoder_from_checkpoint(const nn::Checkpoint& ckpt);

/// Batch graph over prepared graphs, in the given order.
nn::GraphBatch make_prepared_batch(const PreparedCorpus& corpus, const std::vector<int>& ids,
                                   bool add_virtual_nodes = false);

struct StepRecord {
    long step = 0;
    int epoch = 0;
    /// MRW, HIM, MT, NT; zero for signals whose weight is zero.
    std::array<double, 4> loss{};
    double total = 0.0;
};

struct PretrainResult {
    std::vector<StepRecord> log;
};

struct PretrainOptions {
    /// When set, `epoch-<k>.ckpt` is written after every epoch.
    std::filesystem::path checkpoint_dir;
    /// Stop after this many steps (0 = run all epochs).
    long max_steps = 0;
    std::function<void(const StepRecord&)> on_step;
};

/// Trains `state` on the listed graphs. Heads are added to `state.store`
/// under "mrw", "him" and "mt" when absent.
PretrainResult pretrain_run(const PreparedCorpus& corpus, const std::vector<int>& graph_ids,
                            const PretrainConfig& config, EncoderState& state, const PretrainOptions& options = {});

}  // namespace codegraph::pretrain
