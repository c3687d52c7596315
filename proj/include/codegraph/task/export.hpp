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

#include <ostream>
#include <vector>

#include "codegraph/pretrain/pretrain.hpp"

namespace codegraph::task {

/// One line per node: `<graph_id>\t<node_id>\t<feature>\t<v1> ... <vd>`.
/// Values use the shortest representation that round-trips.
void export_node_embeddings(std::ostream& out, const pretrain::PreparedCorpus& corpus, const std::vector<int>& ids,
                            const pretrain::EncoderState& state);

/// One line per graph: `<graph_id>\t<v1> ... <vd>`, the mean of its node rows.
void export_method_embeddings(std::ostream& out, const pretrain::PreparedCorpus& corpus, const std::vector<int>& ids,
                              const pretrain::EncoderState& state);

}  // namespace codegraph::task
