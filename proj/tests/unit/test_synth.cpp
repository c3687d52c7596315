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

#include <doctest.h>

#include <filesystem>
#include <set>

#include "codegraph/corpus/build.hpp"
#include "codegraph/frontend/parser.hpp"
#include "codegraph/synth/synth.hpp"

using namespace codegraph;
namespace fs = std::filesystem;

TEST_SUITE("synth") {

TEST_CASE("random methods are deterministic and parse") {
    Rng a(5), b(5);
    for (int i = 0; i < 200; ++i) {
        const std::string src = synth::random_method(a);
        CHECK(src == synth::random_method(b));
        CHECK_NOTHROW(frontend::parse_method_source(src));
    }
}

TEST_CASE("fixture corpus is deterministic and spread over packages") {
    const auto m = synth::fixture_corpus(60, 4, 2);
    const auto again = synth::fixture_corpus(60, 4, 2);
    REQUIRE(m.size() == 60);
    std::set<std::string> packages;
    for (std::size_t i = 0; i < m.size(); ++i) {
        CHECK(m[i].source == again[i].source);
        CHECK(m[i].package == again[i].package);
        packages.insert(m[i].package);
        const auto ast = frontend::parse_method_source(m[i].source);
        CHECK(ast.name == m[i].name);
    }
    CHECK(packages.size() == 4);
    CHECK(synth::fixture_corpus(60, 4, 3)[0].source != m[0].source);
    CHECK_THROWS_AS(synth::fixture_corpus(3, 0, 1), ConfigError);
}

TEST_CASE("written source trees build like the in-memory units") {
    const auto methods = synth::fixture_corpus(25, 3, 9);
    const fs::path root = fs::temp_directory_path() / "codegraph-synth-tree";
    fs::remove_all(root);
    synth::write_source_tree(methods, root);
    const auto from_disk = corpus::build_graphs_from_dir(root, graph::Flavor::Sigma1);
    const auto in_memory = corpus::build_graphs(synth::as_source_units(methods), graph::Flavor::Sigma1);
    CHECK(from_disk.issues.empty());
    REQUIRE(from_disk.graphs.size() == 25);
    REQUIRE(in_memory.graphs.size() == 25);
    for (std::size_t i = 0; i < 25; ++i) {
        CHECK(from_disk.graphs[i].method_id == in_memory.graphs[i].method_id);
        CHECK(graph::structurally_equal(from_disk.graphs[i], in_memory.graphs[i]));
    }
}

}
