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

// Writes a templated MiniJ corpus, one Methods.mj per package directory.
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "codegraph/synth/synth.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic MiniJ source tree.", "codegraph-synth"};
    std::size_t methods = 200;
    std::size_t packages = 10;
    std::uint64_t seed = 0;
    std::string out;
    app.add_option("--methods", methods, "number of methods")->capture_default_str();
    app.add_option("--packages", packages, "number of packages")->capture_default_str();
    app.add_option("--seed", seed, "generator seed")->capture_default_str();
    app.add_option("--out", out, "output directory")->required();
    CLI11_PARSE(app, argc, argv);
    try {
        if (packages == 0) throw std::invalid_argument("--packages must be at least 1");
        codegraph::synth::write_source_tree(codegraph::synth::fixture_corpus(methods, packages, seed), out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << "methods: " << methods << "\npackages: " << packages << "\nout: " << out << "\n";
    return 0;
}
