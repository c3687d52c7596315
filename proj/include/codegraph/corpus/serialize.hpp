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

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codegraph/corpus/corpus.hpp"
#include "codegraph/graph/sigma_graph.hpp"

namespace codegraph::corpus {

class FormatError : public Error {
public:
    FormatError(const std::string& message, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Percent-encodes '%', tab, LF and CR.
std::string percent_encode(std::string_view s);
std::string percent_decode(std::string_view s);

/// Line-oriented, tab-separated text:
///   SIGMA <flavor> <method_id>
///   N <id> <ntype> <feature> [<ast_kind>]
///   E <src> <etype> <dst>
/// Every line ends with '\n'.
std::string serialize_graph(const graph::SigmaGraph& g);
graph::SigmaGraph deserialize_graph(std::string_view bytes);

void write_graph_file(const std::filesystem::path& path, const graph::SigmaGraph& g);
graph::SigmaGraph read_graph_file(const std::filesystem::path& path);

/// `<package>\t<graph file>` per line; graph paths are relative to the
/// manifest's directory.
struct ManifestEntry {
    std::string package;
    std::string graph_file;
};
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Loads every graph listed in a manifest and assembles the corpus.
Corpus load_corpus(const std::filesystem::path& manifest);

void write_splits(const std::filesystem::path& path, const std::map<std::string, Split>& splits);
std::map<std::string, Split> read_splits(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace codegraph::corpus
