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
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "codegraph/corpus/corpus.hpp"
#include "codegraph/embed/embed.hpp"
#include "codegraph/graph/sigma_graph.hpp"
#include "codegraph/pretrain/pretrain.hpp"
#include "codegraph/task/link.hpp"
#include "codegraph/task/name.hpp"

namespace codegraph::cli {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutEnv = "CODEGRAPH_OUT";
inline constexpr const char* kDefaultOut = "codegraph-out";

enum class TaskKind { Name, Link };
std::string_view to_string(TaskKind t);
TaskKind parse_task(std::string_view s);

/// Every setting of the pipeline. Paths left empty are derived from `out`.
struct RunConfig {
    std::string source;
    std::string out;
    std::string manifest;
    std::string checkpoint;
    std::string head;
    TaskKind task = TaskKind::Name;
    corpus::Split split = corpus::Split::Test;
    graph::Flavor flavor = graph::Flavor::Sigma0;
    std::uint64_t seed = 0;

    corpus::SplitRatios ratios;
    embed::SubwordConfig subword;
    pretrain::PretrainConfig pretrain;
    long pretrain_max_steps = 0;
    task::NameConfig name;
    task::LinkConfig link;

    /// Validates every section and propagates `seed` into them.
    void validate() const;
    pretrain::PretrainConfig pretrain_config() const;
    task::NameConfig name_config() const;
    task::LinkConfig link_config() const;
    nn::RgcnConfig rgcn_config() const;
};

struct ConfigKey {
    std::string name;
    std::string help;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

/// All keys, in documentation order.
const std::vector<ConfigKey>& config_keys();
const ConfigKey& config_key(std::string_view name);

void set_value(RunConfig& config, std::string_view key, std::string_view value);
std::string get_value(const RunConfig& config, std::string_view key);

/// `key = value` lines; blank lines and lines starting with '#' are ignored.
/// Unknown keys and malformed lines throw ConfigError naming the line.
void apply_config_text(RunConfig& config, std::string_view text);

/// Every key as `key = value`, in table order.
std::string render_config(const RunConfig& config);

/// "dep,dep;condition,inv_dep" and back.
std::vector<pretrain::Metapath> parse_metapaths(std::string_view s);
std::string format_metapaths(const std::vector<pretrain::Metapath>& mps);

}  // namespace codegraph::cli
