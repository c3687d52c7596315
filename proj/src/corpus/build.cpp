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

#include "codegraph/corpus/build.hpp"

#include "codegraph/graph/builder.hpp"
#include "codegraph/graph/validate.hpp"

namespace codegraph::corpus {

std::string make_method_id(std::string_view package, std::string_view file, std::string_view name, int ordinal) {
    std::string id;
    id.append(package).append(":").append(file).append(":").append(name).append(":");
    id += std::to_string(ordinal);
    return id;
}

std::string method_name_of(std::string_view method_id) {
    const auto last = method_id.rfind(':');
    if (last == std::string_view::npos || last == 0) return std::string(method_id);
    const auto prev = method_id.rfind(':', last - 1);
    if (prev == std::string_view::npos) return std::string(method_id);
    return std::string(method_id.substr(prev + 1, last - prev - 1));
}

BuiltGraphs build_graphs(const std::vector<frontend::SourceUnit>& units, graph::Flavor flavor) {
    BuiltGraphs out;
    for (const auto& unit : units) {
        const std::string file = std::filesystem::path(unit.origin).filename().string();
        for (std::size_t i = 0; i < unit.methods.size(); ++i) {
            const std::string origin = unit.origin + "#" + std::to_string(i);
            try {
                auto ast = frontend::parse_method_source(unit.methods[i]);
                auto g = graph::build_graph(ast, flavor,
                                            make_method_id(unit.package_name, file, ast.name, static_cast<int>(i)));
                auto violations = graph::validate_graph(g);
                if (!violations.empty()) {
                    out.issues.push_back({origin, "invalid graph: " + std::string(to_string(violations[0].kind)) +
                                                      " " + violations[0].detail});
                    continue;
                }
                out.graphs.push_back(std::move(g));
                out.packages.push_back(unit.package_name);
            } catch (const Error& e) {
                out.issues.push_back({origin, e.what()});
            }
        }
    }
    return out;
}

BuiltGraphs build_graphs_from_dir(const std::filesystem::path& root, graph::Flavor flavor) {
    std::vector<frontend::SourceLoadError> errors;
    auto units = frontend::load_source_tree(root, &errors);
    BuiltGraphs out = build_graphs(units, flavor);
    std::vector<BuildIssue> issues;
    for (auto& e : errors) issues.push_back({e.origin, e.message});
    issues.insert(issues.end(), out.issues.begin(), out.issues.end());
    out.issues = std::move(issues);
    return out;
}

}  // namespace codegraph::corpus
