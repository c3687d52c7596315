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

#include "codegraph/task/export.hpp"

#include <array>
#include <charconv>
#include <string>

namespace codegraph::task {

namespace {

void put_double(std::ostream& out, double d) {
    std::array<char, 32> buf;
    auto r = std::to_chars(buf.data(), buf.data() + buf.size(), d);
    out.write(buf.data(), r.ptr - buf.data());
}

template <typename F>
void for_each_batch(const pretrain::PreparedCorpus& corpus, const std::vector<int>& ids,
                    const pretrain::EncoderState& state, F&& f) {
    Rng unused(0);
    for (std::size_t s = 0; s < ids.size(); s += 32) {
        const std::vector<int> chunk(ids.begin() + static_cast<std::ptrdiff_t>(s),
                                     ids.begin() + static_cast<std::ptrdiff_t>(std::min(ids.size(), s + 32)));
        const auto batch = pretrain::make_prepared_batch(corpus, chunk);
        const nn::Mat h = state.encoder.forward(batch, false, unused).value();
        for (std::size_t g = 0; g < chunk.size(); ++g) {
            f(corpus.graphs[static_cast<std::size_t>(chunk[g])].graph,
              h.middleRows(batch.offset[g], batch.offset[g + 1] - batch.offset[g]));
        }
    }
}

}  // namespace

void export_node_embeddings(std::ostream& out, const pretrain::PreparedCorpus& corpus, const std::vector<int>& ids,
                            const pretrain::EncoderState& state) {
    for_each_batch(corpus, ids, state, [&](const graph::SigmaGraph& g, const nn::Mat& h) {
        for (Eigen::Index v = 0; v < h.rows(); ++v) {
            out << g.method_id << '\t' << g.nodes[static_cast<std::size_t>(v)].id << '\t'
                << g.nodes[static_cast<std::size_t>(v)].feature << '\t';
            for (Eigen::Index j = 0; j < h.cols(); ++j) {
                if (j) out << ' ';
                put_double(out, h(v, j));
            }
            out << '\n';
        }
    });
}

void export_method_embeddings(std::ostream& out, const pretrain::PreparedCorpus& corpus, const std::vector<int>& ids,
                              const pretrain::EncoderState& state) {
    for_each_batch(corpus, ids, state, [&](const graph::SigmaGraph& g, const nn::Mat& h) {
        const Eigen::RowVectorXd mean = h.colwise().mean();
        out << g.method_id << '\t';
        for (Eigen::Index j = 0; j < mean.size(); ++j) {
            if (j) out << ' ';
            put_double(out, mean(j));
        }
        out << '\n';
    });
}

}  // namespace codegraph::task
