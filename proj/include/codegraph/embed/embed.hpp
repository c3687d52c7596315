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
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "codegraph/common/error.hpp"
#include "codegraph/corpus/corpus.hpp"
#include "codegraph/graph/sigma_graph.hpp"

namespace codegraph::embed {

/// Splits a node feature on '.', lowercases, drops empty segments.
std::vector<std::string> subtokenize_feature(std::string_view feature);

/// Splits an identifier on underscores and camelCase boundaries
/// ("getItemId" -> get item id, "parseHTTPResponse" -> parse http response),
/// lowercased.
std::vector<std::string> subtokenize_name(std::string_view identifier);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view s);

enum class EmbedMode { HashedNgram, PretrainedTable };

struct SubwordConfig {
    int dim = 300;
    std::uint64_t buckets = 1ULL << 20;
    int min_n = 3;
    int max_n = 6;
    std::uint64_t seed = 0x5eed;
};

/// Character n-gram subword embedder. Bucket vectors are drawn from
/// U[-1/d, 1/d] as a pure function of (seed, bucket, coordinate), so the
/// table never has to be materialized.
class SubwordEmbedder {
public:
    explicit SubwordEmbedder(SubwordConfig config = {});

    /// Textual word vectors, one `<token> <v1> ... <vd>` per line, with an
    /// optional `<count> <dim>` first line. Tokens missing from the table
    /// fall back to hashed n-grams.
    static SubwordEmbedder with_pretrained(const std::filesystem::path& path, SubwordConfig config = {});

    int dim() const { return config_.dim; }
    EmbedMode mode() const { return table_.empty() ? EmbedMode::HashedNgram : EmbedMode::PretrainedTable; }
    const SubwordConfig& config() const { return config_; }

    /// n-grams of "<s>" for n in [min_n, max_n].
    std::vector<std::string> ngrams(std::string_view subtoken) const;
    std::uint64_t bucket_of(std::string_view ngram) const { return fnv1a(ngram) % config_.buckets; }
    Eigen::VectorXd bucket_vector(std::uint64_t bucket) const;

    Eigen::VectorXd embed_subtoken(std::string_view subtoken) const;

    /// Mean subtoken embedding of a feature string.
    Eigen::VectorXd embed_feature(std::string_view feature) const;

private:
    SubwordConfig config_;
    std::unordered_map<std::string, Eigen::VectorXd> table_;
};

class AlreadyAugmented : public Error {
public:
    using Error::Error;
};

/// Appends (v, inv_r, u) for every edge (u, r, v), after the original edges.
graph::SigmaGraph add_inverse_edges(graph::SigmaGraph g);

/// Learnable rows shared by strict-equality features across the corpus.
/// Row i belongs to corpus::strict_feature_universe()[i].
Eigen::MatrixXd initial_global_embeddings(const SubwordEmbedder& embedder);

/// Input features of one graph. Strict nodes carry their global row id and a
/// copy of that row; other nodes carry their subword feature and -1.
struct NodeInitFeatures {
    Eigen::MatrixXd x;
    std::vector<int> global_row;
};

NodeInitFeatures node_init_features(const graph::SigmaGraph& g, const SubwordEmbedder& embedder,
                                    const Eigen::MatrixXd& global_embeddings);

/// Feature of a single node: its global row when strict, else the subword
/// mean of its feature.
Eigen::VectorXd node_init_feature(const graph::SigmaNode& node, const SubwordEmbedder& embedder,
                                  const Eigen::MatrixXd& global_embeddings);

}  // namespace codegraph::embed
