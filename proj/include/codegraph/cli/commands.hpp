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
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "codegraph/cli/config.hpp"

namespace codegraph::cli {

/// Output locations derived from a config. `out` falls back to
/// $CODEGRAPH_OUT and then to kDefaultOut.
struct Paths {
    std::filesystem::path out;
    std::filesystem::path manifest;
    std::filesystem::path splits;
    std::filesystem::path report;
    std::filesystem::path encoder;
    std::filesystem::path checkpoints;
    std::filesystem::path pretrain_log;

    std::filesystem::path task_encoder(TaskKind t) const;
    std::filesystem::path task_head(TaskKind t) const;
    std::filesystem::path task_metrics(TaskKind t) const;
    std::filesystem::path eval_metrics(TaskKind t, corpus::Split s) const;
    std::filesystem::path node_embeddings() const { return out / "node-embeddings.tsv"; }
    std::filesystem::path method_embeddings() const { return out / "method-embeddings.tsv"; }
};

Paths resolve_paths(const RunConfig& config);

/// Each command returns the process exit code and throws codegraph::Error
/// on failure.
int cmd_build(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_pretrain(const RunConfig& config, std::ostream& out);
int cmd_finetune(const RunConfig& config, std::ostream& out);
int cmd_eval(const RunConfig& config, std::ostream& out);
int cmd_export(const RunConfig& config, std::ostream& out);

/// One metrics record as written to disk: compact JSON and a newline.
std::string format_record(const nlohmann::json& record);

/// Parses the command line, runs the subcommand and maps errors to a
/// nonzero exit code with a message on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace codegraph::cli
