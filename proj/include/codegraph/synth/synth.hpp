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
#include <vector>

#include "codegraph/common/rng.hpp"
#include "codegraph/frontend/parser.hpp"

namespace codegraph::synth {

struct RandomMethodOptions {
    int max_depth = 3;
    int max_block_statements = 4;
    int max_params = 3;
};

/// A random, always-valid MiniJ method. Every construct of the grammar is
/// reachable: nested control flow, try/catch/finally, receiver and
/// receiverless calls, constructors, all infix operators, all literal kinds.
std::string random_method(Rng& rng, const RandomMethodOptions& options = {});

struct FixtureMethod {
    std::string package;
    std::string name;
    std::string source;
};

/// Templated corpus whose method names are predictable from their bodies:
/// the verb picks the control/data-flow shape and the noun picks the types
/// and calls involved. Methods are spread round-robin over `num_packages`
/// packages after a seeded shuffle.
std::vector<FixtureMethod> fixture_corpus(std::size_t num_methods, std::size_t num_packages,
                                          std::uint64_t seed);

/// Writes one `Methods.mj` file per package under `root/<package>/`.
void write_source_tree(const std::vector<FixtureMethod>& methods, const std::filesystem::path& root);

/// The same layout as write_source_tree, in memory: one unit per package in
/// package order, origin `<package>/Methods.mj`.
std::vector<frontend::SourceUnit> as_source_units(const std::vector<FixtureMethod>& methods);

}  // namespace codegraph::synth
