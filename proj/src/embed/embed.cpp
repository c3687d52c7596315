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

#include "codegraph/embed/embed.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "codegraph/common/rng.hpp"

namespace codegraph::embed {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string> subtokenize_feature(std::string_view feature) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : feature) {
        if (c == '.') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += lower(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<std::string> subtokenize_name(std::string_view id) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < id.size(); ++i) {
        const char c = id[i];
        if (c == '_' || c == '$') {
            flush();
            continue;
        }
        if (is_upper(c) && !cur.empty()) {
            const char prev = id[i - 1];
            const bool next_lower = i + 1 < id.size() && is_lower(id[i + 1]);
            // fooBar | FOOBar -> FOO + Bar
            if (!is_upper(prev) || next_lower) flush();
        }
        cur += lower(c);
    }
    flush();
    return out;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

SubwordEmbedder::SubwordEmbedder(SubwordConfig config) : config_(config) {
    if (config_.dim <= 0) throw ConfigError("embedding dimension must be positive");
    if (config_.buckets == 0) throw ConfigError("bucket count must be positive");
    if (config_.min_n < 1 || config_.max_n < config_.min_n) throw ConfigError("bad n-gram range");
}

SubwordEmbedder SubwordEmbedder::with_pretrained(const std::filesystem::path& path, SubwordConfig config) {
    SubwordEmbedder e(config);
    std::ifstream f(path);
    if (!f) throw IoError("cannot read " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        std::istringstream in(line);
        std::string token;
        if (!(in >> token)) continue;
        std::vector<double> values;
        double v;
        while (in >> v) values.push_back(v);
        if (lineno == 1 && values.size() == 1) continue;  // "<count> <dim>" header
        if (static_cast<int>(values.size()) != config.dim) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(config.dim) + " values, found " + std::to_string(values.size()));
        }
        e.table_[token] = Eigen::Map<Eigen::VectorXd>(values.data(), config.dim);
    }
    return e;
}

std::vector<std::string> SubwordEmbedder::ngrams(std::string_view subtoken) const {
    const std::string padded = "<" + std::string(subtoken) + ">";
    std::vector<std::string> out;
    for (int n = config_.min_n; n <= config_.max_n; ++n) {
        if (static_cast<std::size_t>(n) > padded.size()) break;
        for (std::size_t i = 0; i + n <= padded.size(); ++i) out.push_back(padded.substr(i, n));
    }
    if (out.empty()) out.push_back(padded);
    return out;
}

Eigen::VectorXd SubwordEmbedder::bucket_vector(std::uint64_t bucket) const {
    const int d = config_.dim;
    Eigen::VectorXd v(d);
    const double scale = 1.0 / d;
    const std::uint64_t base = mix64(config_.seed ^ mix64(bucket));
    for (int j = 0; j < d; ++j) {
        const double u = static_cast<double>(mix64(base + static_cast<std::uint64_t>(j)) >> 11) * 0x1.0p-53;
        v[j] = (2.0 * u - 1.0) * scale;
    }
    return v;
}

Eigen::VectorXd SubwordEmbedder::embed_subtoken(std::string_view subtoken) const {
    if (!table_.empty()) {
        auto it = table_.find(std::string(subtoken));
        if (it != table_.end()) return it->second;
    }
    const auto grams = ngrams(subtoken);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(config_.dim);
    for (const auto& g : grams) sum += bucket_vector(bucket_of(g));
    return sum / static_cast<double>(grams.size());
}

Eigen::VectorXd SubwordEmbedder::embed_feature(std::string_view feature) const {
    auto subs = subtokenize_feature(feature);
    if (subs.empty()) return embed_subtoken(feature);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(config_.dim);
    for (const auto& s : subs) sum += embed_subtoken(s);
    return sum / static_cast<double>(subs.size());
}

graph::SigmaGraph add_inverse_edges(graph::SigmaGraph g) {
    if (g.has_inverse_edges()) throw AlreadyAugmented("graph '" + g.method_id + "' already has inverse edges");
    const std::size_t n = g.edges.size();
    g.edges.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto e = g.edges[i];
        g.edges.push_back({e.dst, graph::inverse_of(e.etype), e.src});
    }
    return g;
}

Eigen::MatrixXd initial_global_embeddings(const SubwordEmbedder& embedder) {
    const auto& universe = corpus::strict_feature_universe();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(universe.size()), embedder.dim());
    for (std::size_t i = 0; i < universe.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = embedder.embed_feature(universe[i]);
    return m;
}

Eigen::VectorXd node_init_feature(const graph::SigmaNode& node, const SubwordEmbedder& embedder,
                                  const Eigen::MatrixXd& global_embeddings) {
    if (corpus::is_strict_feature(node.feature, node.ntype)) {
        const auto& u = corpus::strict_feature_universe();
        const auto it = std::lower_bound(u.begin(), u.end(), node.feature);
        return global_embeddings.row(it - u.begin()).transpose();
    }
    return embedder.embed_feature(node.feature);
}

NodeInitFeatures node_init_features(const graph::SigmaGraph& g, const SubwordEmbedder& embedder,
                                    const Eigen::MatrixXd& global_embeddings) {
    NodeInitFeatures out;
    out.x.resize(g.num_nodes(), embedder.dim());
    out.global_row.assign(g.nodes.size(), -1);
    const auto& u = corpus::strict_feature_universe();
    std::map<std::string, Eigen::VectorXd> cache;
    for (const auto& n : g.nodes) {
        if (corpus::is_strict_feature(n.feature, n.ntype)) {
            const int row = static_cast<int>(std::lower_bound(u.begin(), u.end(), n.feature) - u.begin());
            out.global_row[n.id] = row;
            out.x.row(n.id) = global_embeddings.row(row);
            continue;
        }
        auto it = cache.find(n.feature);
        if (it == cache.end()) it = cache.emplace(n.feature, embedder.embed_feature(n.feature)).first;
        out.x.row(n.id) = it->second.transpose();
    }
    return out;
}

}  // namespace codegraph::embed
