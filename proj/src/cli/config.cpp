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

#include "codegraph/cli/config.hpp"

#include <charconv>
#include <cmath>

namespace codegraph::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
    T out{};
    const auto* end = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc() || ptr != end || v.empty()) {
        throw ConfigError("invalid value '" + std::string(v) + "' for " + std::string(key));
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(out)) throw ConfigError("non-finite value for " + std::string(key));
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("invalid boolean '" + std::string(v) + "' for " + std::string(key));
}

std::string fmt(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

template <typename T>
std::string fmt_int(T x) {
    return std::to_string(x);
}

std::string fmt(bool b) { return b ? "true" : "false"; }

using Keys = std::vector<ConfigKey>;

template <typename T, typename Field>
void add_num(Keys& keys, std::string name, std::string help, Field field) {
    auto key = name;
    keys.push_back({std::move(name), std::move(help),
                    [field, key](RunConfig& c, std::string_view v) { field(c) = parse_number<T>(key, v); },
                    [field](const RunConfig& c) {
                        if constexpr (std::is_floating_point_v<T>) {
                            return fmt(field(c));
                        } else {
                            return fmt_int(field(c));
                        }
                    }});
}

template <typename Field>
void add_bool(Keys& keys, std::string name, std::string help, Field field) {
    auto key = name;
    keys.push_back({std::move(name), std::move(help),
                    [field, key](RunConfig& c, std::string_view v) { field(c) = parse_bool(key, v); },
                    [field](const RunConfig& c) { return fmt(field(c)); }});
}

template <typename Field>
void add_path(Keys& keys, std::string name, std::string help, Field field) {
    keys.push_back({std::move(name), std::move(help),
                    [field](RunConfig& c, std::string_view v) { field(c) = std::string(v); },
                    [field](const RunConfig& c) { return field(c); }});
}

Keys make_keys() {
    Keys k;
    add_path(k, "source", "directory of .mj sources, one package per subdirectory",
             [](auto& c) -> auto& { return c.source; });
    add_path(k, "out", "output directory (default: $CODEGRAPH_OUT, else codegraph-out)",
             [](auto& c) -> auto& { return c.out; });
    add_path(k, "manifest", "graph manifest (default: <out>/manifest.tsv)",
             [](auto& c) -> auto& { return c.manifest; });
    add_path(k, "checkpoint", "encoder checkpoint; empty means a freshly initialized encoder",
             [](auto& c) -> auto& { return c.checkpoint; });
    add_path(k, "head", "task head checkpoint (default: <out>/<task>-head.ckpt)",
             [](auto& c) -> auto& { return c.head; });
    k.push_back({"task", "fine-tuning task: name or link",
                 [](RunConfig& c, std::string_view v) { c.task = parse_task(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.task)); }});
    k.push_back({"split", "evaluation split: train, valid or test",
                 [](RunConfig& c, std::string_view v) { c.split = corpus::parse_split(v); },
                 [](const RunConfig& c) { return std::string(corpus::to_string(c.split)); }});
    k.push_back({"flavor", "graph flavor: sigma0 or sigma1",
                 [](RunConfig& c, std::string_view v) {
                     auto f = graph::parse_flavor(v);
                     if (!f) throw ConfigError("invalid flavor '" + std::string(v) + "'");
                     c.flavor = *f;
                 },
                 [](const RunConfig& c) { return std::string(graph::to_string(c.flavor)); }});
    add_num<std::uint64_t>(k, "seed", "seed of every random choice", [](auto& c) -> auto& { return c.seed; });

    add_num<double>(k, "split-train", "share of packages used for training",
                    [](auto& c) -> auto& { return c.ratios.train; });
    add_num<double>(k, "split-valid", "share of packages used for validation",
                    [](auto& c) -> auto& { return c.ratios.valid; });
    add_num<double>(k, "split-test", "share of packages used for testing",
                    [](auto& c) -> auto& { return c.ratios.test; });

    add_num<int>(k, "embed-dim", "subtoken embedding width", [](auto& c) -> auto& { return c.subword.dim; });
    add_num<std::uint64_t>(k, "embed-buckets", "number of n-gram hash buckets",
                           [](auto& c) -> auto& { return c.subword.buckets; });
    add_num<int>(k, "embed-min-n", "shortest character n-gram", [](auto& c) -> auto& { return c.subword.min_n; });
    add_num<int>(k, "embed-max-n", "longest character n-gram", [](auto& c) -> auto& { return c.subword.max_n; });
    add_num<std::uint64_t>(k, "embed-seed", "seed of the n-gram bucket vectors",
                           [](auto& c) -> auto& { return c.subword.seed; });

    add_num<int>(k, "hidden", "encoder width", [](auto& c) -> auto& { return c.pretrain.hidden; });
    add_num<int>(k, "layers", "encoder depth", [](auto& c) -> auto& { return c.pretrain.layers; });
    add_num<double>(k, "dropout", "encoder dropout", [](auto& c) -> auto& { return c.pretrain.dropout; });

    add_num<int>(k, "pretrain-epochs", "pre-training epochs", [](auto& c) -> auto& { return c.pretrain.epochs; });
    add_num<long>(k, "pretrain-max-steps", "stop pre-training after this many steps (0 = no limit)",
                  [](auto& c) -> auto& { return c.pretrain_max_steps; });
    add_num<double>(k, "pretrain-lr", "pre-training learning rate", [](auto& c) -> auto& { return c.pretrain.lr; });
    add_num<double>(k, "pretrain-l2", "pre-training L2 weight", [](auto& c) -> auto& { return c.pretrain.l2; });
    add_num<int>(k, "pretrain-batch-size", "graphs per pre-training step",
                 [](auto& c) -> auto& { return c.pretrain.batch_size; });
    add_num<int>(k, "walks-per-node", "metapath walks started per node and metapath",
                 [](auto& c) -> auto& { return c.pretrain.walks_per_node; });
    add_num<int>(k, "walk-negatives", "negative pairs per positive walk pair",
                 [](auto& c) -> auto& { return c.pretrain.negatives; });
    k.push_back({"metapaths", "metapaths as ';'-separated lists of ','-separated edge types",
                 [](RunConfig& c, std::string_view v) { c.pretrain.metapaths = parse_metapaths(v); },
                 [](const RunConfig& c) { return format_metapaths(c.pretrain.metapaths); }});
    add_num<int>(k, "mt-hidden", "hidden width of the motif regressor",
                 [](auto& c) -> auto& { return c.pretrain.mt_hidden; });
    add_bool(k, "nt-stop-gradient", "do not backpropagate through tying group means",
             [](auto& c) -> auto& { return c.pretrain.nt_stop_gradient; });
    add_bool(k, "him-per-type-shuffle", "corrupt by shuffling rows within each node type",
             [](auto& c) -> auto& { return c.pretrain.him_per_type_shuffle; });
    add_num<double>(k, "omega-mrw", "weight of the metapath walk loss",
                    [](auto& c) -> auto& { return c.pretrain.weights.omega[0]; });
    add_num<double>(k, "omega-him", "weight of the information maximization loss",
                    [](auto& c) -> auto& { return c.pretrain.weights.omega[1]; });
    add_num<double>(k, "omega-mt", "weight of the motif loss",
                    [](auto& c) -> auto& { return c.pretrain.weights.omega[2]; });
    add_num<double>(k, "omega-nt", "weight of the node tying loss",
                    [](auto& c) -> auto& { return c.pretrain.weights.omega[3]; });

    add_num<int>(k, "name-epochs", "name fine-tuning epochs", [](auto& c) -> auto& { return c.name.epochs; });
    add_num<double>(k, "name-lr", "name fine-tuning learning rate", [](auto& c) -> auto& { return c.name.lr; });
    add_num<double>(k, "name-l2", "name fine-tuning L2 weight", [](auto& c) -> auto& { return c.name.l2; });
    add_num<int>(k, "name-batch-size", "graphs per name fine-tuning step",
                 [](auto& c) -> auto& { return c.name.batch_size; });
    k.push_back({"pooling", "graph pooling: average, virtual_node or attention",
                 [](RunConfig& c, std::string_view v) { c.name.pooling = task::parse_pooling(v); },
                 [](const RunConfig& c) { return std::string(task::to_string(c.name.pooling)); }});
    add_bool(k, "freeze-encoder", "keep encoder weights fixed during name fine-tuning",
             [](auto& c) -> auto& { return c.name.freeze_encoder; });
    add_num<std::size_t>(k, "vocab-size", "subtoken vocabulary size, PAD and UNK excluded",
                         [](auto& c) -> auto& { return c.name.vocab_size; });

    k.push_back({"scorer", "link scorer: distmult or mlp",
                 [](RunConfig& c, std::string_view v) { c.link.scorer = task::parse_scorer(v); },
                 [](const RunConfig& c) { return std::string(task::to_string(c.link.scorer)); }});
    add_num<int>(k, "link-epochs", "link fine-tuning epochs", [](auto& c) -> auto& { return c.link.epochs; });
    add_num<double>(k, "link-lr", "link fine-tuning learning rate", [](auto& c) -> auto& { return c.link.lr; });
    add_num<double>(k, "link-l2", "link fine-tuning L2 weight", [](auto& c) -> auto& { return c.link.l2; });
    add_num<int>(k, "link-mlp-hidden", "hidden width of the MLP scorer",
                 [](auto& c) -> auto& { return c.link.mlp_hidden; });
    add_num<int>(k, "link-train-negatives", "corrupted edges per true edge during training",
                 [](auto& c) -> auto& { return c.link.train_negatives; });
    add_num<int>(k, "link-eval-negatives", "corrupted edges per test edge",
                 [](auto& c) -> auto& { return c.link.eval_negatives; });
    add_num<double>(k, "held-out-ratio", "share of each graph's edges held out for link prediction",
                    [](auto& c) -> auto& { return c.link.held_out_ratio; });
    return k;
}

}  // namespace

std::string_view to_string(TaskKind t) { return t == TaskKind::Name ? "name" : "link"; }

TaskKind parse_task(std::string_view s) {
    if (s == "name") return TaskKind::Name;
    if (s == "link") return TaskKind::Link;
    throw ConfigError("unknown task '" + std::string(s) + "'");
}

void RunConfig::validate() const {
    if (!(ratios.train > 0 && ratios.valid >= 0 && ratios.test >= 0)) throw ConfigError("split ratios out of range");
    if (subword.dim < 1) throw ConfigError("embed-dim must be at least 1");
    if (subword.buckets < 1) throw ConfigError("embed-buckets must be at least 1");
    if (subword.min_n < 1 || subword.max_n < subword.min_n) throw ConfigError("embed n-gram range is empty");
    if (pretrain_max_steps < 0) throw ConfigError("pretrain-max-steps must be non-negative");
    pretrain_config().validate();
    name_config().validate();
    link_config().validate();
}

pretrain::PretrainConfig RunConfig::pretrain_config() const {
    auto c = pretrain;
    c.seed = seed;
    return c;
}

task::NameConfig RunConfig::name_config() const {
    auto c = name;
    c.seed = seed;
    return c;
}

task::LinkConfig RunConfig::link_config() const {
    auto c = link;
    c.seed = seed;
    return c;
}

nn::RgcnConfig RunConfig::rgcn_config() const { return pretrain.rgcn(subword.dim); }

const std::vector<ConfigKey>& config_keys() {
    static const Keys keys = make_keys();
    return keys;
}

const ConfigKey& config_key(std::string_view name) {
    for (const auto& k : config_keys()) {
        if (k.name == name) return k;
    }
    throw ConfigError("unknown config key '" + std::string(name) + "'");
}

void set_value(RunConfig& config, std::string_view key, std::string_view value) {
    config_key(key).set(config, value);
}

std::string get_value(const RunConfig& config, std::string_view key) { return config_key(key).get(config); }

void apply_config_text(RunConfig& config, std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string line = trim(text.substr(pos, nl - pos));
        ++line_no;
        pos = nl + 1;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        try {
            set_value(config, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::string render_config(const RunConfig& config) {
    std::string out;
    for (const auto& k : config_keys()) out += k.name + " = " + k.get(config) + "\n";
    return out;
}

std::vector<pretrain::Metapath> parse_metapaths(std::string_view s) {
    std::vector<pretrain::Metapath> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        auto semi = s.find(';', pos);
        if (semi == std::string_view::npos) semi = s.size();
        const auto path = s.substr(pos, semi - pos);
        pretrain::Metapath mp;
        std::size_t p = 0;
        while (p <= path.size()) {
            auto comma = path.find(',', p);
            if (comma == std::string_view::npos) comma = path.size();
            const std::string name = trim(path.substr(p, comma - p));
            auto t = graph::parse_edge_type(name);
            if (!t) throw ConfigError("unknown edge type '" + name + "' in metapaths");
            mp.push_back(*t);
            p = comma + 1;
        }
        out.push_back(std::move(mp));
        pos = semi + 1;
    }
    return out;
}

std::string format_metapaths(const std::vector<pretrain::Metapath>& mps) {
    std::string out;
    for (std::size_t i = 0; i < mps.size(); ++i) {
        if (i) out += ';';
        for (std::size_t j = 0; j < mps[i].size(); ++j) {
            if (j) out += ',';
            out += graph::to_string(mps[i][j]);
        }
    }
    return out;
}

}  // namespace codegraph::cli
