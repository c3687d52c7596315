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

#include "codegraph/corpus/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "codegraph/common/rng.hpp"
#include "codegraph/frontend/token.hpp"

namespace codegraph::corpus {

using graph::NodeType;

std::string_view to_string(Tying t) {
    switch (t) {
        case Tying::Strict: return "strict";
        case Tying::Weak: return "weak";
        case Tying::Untied: return "untied";
    }
    return "?";
}

std::string_view to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        case Split::Test: return "test";
    }
    return "?";
}

Split parse_split(std::string_view s) {
    if (s == "train") return Split::Train;
    if (s == "valid") return Split::Valid;
    if (s == "test") return Split::Test;
    throw ConfigError("unknown split '" + std::string(s) + "'");
}

bool is_strict_feature(std::string_view feature, NodeType ntype) {
    switch (ntype) {
        case NodeType::Entry: return feature == graph::kEntryFeature;
        case NodeType::Exit: return feature == graph::kExitFeature;
        case NodeType::Control: return frontend::is_keyword(feature);
        case NodeType::Action: return feature == "=" || frontend::is_infix_operator(feature);
        case NodeType::Data: return false;
    }
    return false;
}

const std::vector<std::string>& strict_feature_universe() {
    static const std::vector<std::string> universe = [] {
        std::set<std::string> s = {std::string(graph::kEntryFeature), std::string(graph::kExitFeature),
                                   "if", "while", "for", "catch", "finally", "="};
        for (const char* op : {"+", "-", "*", "/", "%", "==", "!=", "<", ">", "<=", ">=", "&&", "||"}) {
            s.insert(op);
        }
        return std::vector<std::string>(s.begin(), s.end());
    }();
    return universe;
}

Tying classify_tying(std::string_view feature, NodeType ntype, std::size_t occurrences) {
    if (is_strict_feature(feature, ntype)) return Tying::Strict;
    return occurrences >= 2 ? Tying::Weak : Tying::Untied;
}

int TyingIndex::strict_row(std::string_view feature, NodeType ntype) const {
    if (!is_strict_feature(feature, ntype)) return -1;
    auto it = strict_vocab.find(std::string(feature));
    return it == strict_vocab.end() ? -1 : it->second;
}

TyingIndex build_tying_index(const std::vector<graph::SigmaGraph>& graphs) {
    TyingIndex idx;
    const auto& universe = strict_feature_universe();
    for (std::size_t i = 0; i < universe.size(); ++i) idx.strict_vocab[universe[i]] = static_cast<int>(i);

    std::map<std::string, std::vector<NodeRef>> candidates;
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        for (const auto& n : graphs[gi].nodes) {
            if (is_strict_feature(n.feature, n.ntype)) continue;
            candidates[n.feature].push_back({static_cast<int>(gi), n.id});
        }
    }
    for (auto& [feature, refs] : candidates) {
        if (classify_tying(feature, NodeType::Data, refs.size()) == Tying::Weak) {
            idx.weak_groups.emplace(feature, std::move(refs));
        }
    }
    return idx;
}

std::vector<int> Corpus::graphs_in(Split s) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        auto it = splits.find(graph_package[i]);
        if (it != splits.end() && it->second == s) out.push_back(static_cast<int>(i));
    }
    return out;
}

std::size_t Corpus::num_nodes() const {
    std::size_t n = 0;
    for (const auto& g : graphs) n += g.nodes.size();
    return n;
}

Corpus assemble_corpus(std::vector<graph::SigmaGraph> graphs, std::vector<std::string> package_of) {
    if (package_of.size() != graphs.size()) {
        throw ConfigError("package list has " + std::to_string(package_of.size()) + " entries for " +
                          std::to_string(graphs.size()) + " graphs");
    }
    std::set<std::string> ids;
    for (const auto& g : graphs) {
        if (!ids.insert(g.method_id).second) throw DuplicateGraphId("duplicate graph id '" + g.method_id + "'");
    }
    Corpus c;
    c.tying = build_tying_index(graphs);
    for (std::size_t i = 0; i < graphs.size(); ++i) c.packages[package_of[i]].push_back(static_cast<int>(i));
    c.graphs = std::move(graphs);
    c.graph_package = std::move(package_of);
    return c;
}

std::map<std::string, Split> split_packages(std::vector<std::string> packages, SplitRatios ratios,
                                            std::uint64_t seed) {
    std::sort(packages.begin(), packages.end());
    packages.erase(std::unique(packages.begin(), packages.end()), packages.end());
    const std::size_t n = packages.size();
    if (n < 3) throw TooFewPackages("need at least 3 packages to split, got " + std::to_string(n));
    if (ratios.train < 0 || ratios.valid < 0 || ratios.test < 0) throw ConfigError("negative split ratio");

    auto count = [&](double r) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(n) * r)));
    };
    std::size_t n_valid = count(ratios.valid);
    std::size_t n_test = count(ratios.test);
    while (n_valid + n_test > n - 1) {
        if (n_valid >= n_test && n_valid > 1) {
            --n_valid;
        } else {
            --n_test;
        }
    }
    Rng rng(seed);
    rng.shuffle(packages);
    std::map<std::string, Split> out;
    for (std::size_t i = 0; i < n; ++i) {
        Split s = i < n_valid ? Split::Valid : (i < n_valid + n_test ? Split::Test : Split::Train);
        out[packages[i]] = s;
    }
    return out;
}

std::map<std::string, Split> split_corpus(const Corpus& corpus, SplitRatios ratios, std::uint64_t seed) {
    std::vector<std::string> names;
    for (const auto& [name, ids] : corpus.packages) names.push_back(name);
    return split_packages(std::move(names), ratios, seed);
}

}  // namespace codegraph::corpus
