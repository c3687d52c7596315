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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "codegraph/frontend/parser.hpp"
#include "codegraph/graph/sigma_graph.hpp"

namespace codegraph::corpus {

struct BuildIssue {
    std::string origin;
    std::string message;
};

struct BuiltGraphs {
    std::vector<graph::SigmaGraph> graphs;
    std::vector<std::string> packages;
    std::vector<BuildIssue> issues;
};

/// `<package>:<file>:<method name>:<ordinal in file>`.
std::string make_method_id(std::string_view package, std::string_view file, std::string_view name, int ordinal);

/// The method name embedded in a method id; the whole id when it does not
/// have the expected shape.
std::string method_name_of(std::string_view method_id);

/// Parses and builds every method. A method that fails to parse or build is
/// reported and skipped; the rest of its file is still processed.
BuiltGraphs build_graphs(const std::vector<frontend::SourceUnit>& units, graph::Flavor flavor);

/// load_source_tree + build_graphs.
BuiltGraphs build_graphs_from_dir(const std::filesystem::path& root, graph::Flavor flavor);

}  // namespace codegraph::corpus
