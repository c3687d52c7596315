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

#include "codegraph/cli/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "codegraph/corpus/build.hpp"
#include "codegraph/corpus/serialize.hpp"
#include "codegraph/task/export.hpp"

namespace codegraph::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    return f;
}

corpus::Corpus load(const Paths& paths) {
    if (!fs::exists(paths.manifest)) throw IoError("missing manifest " + paths.manifest.string());
    auto c = corpus::load_corpus(paths.manifest);
    if (fs::exists(paths.splits)) c.splits = corpus::read_splits(paths.splits);
    return c;
}

std::vector<int> all_ids(const corpus::Corpus& c) {
    std::vector<int> ids(c.graphs.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
    return ids;
}

std::vector<int> split_ids(const corpus::Corpus& c, corpus::Split s) {
    return c.splits.empty() ? all_ids(c) : c.graphs_in(s);
}

/// Encoder from `path` when given, otherwise freshly initialized from the
/// config. `prepared` is filled with features matching the encoder.
pretrain::EncoderState encoder_for(const RunConfig& config, const fs::path& path, const corpus::Corpus& c,
                                   pretrain::PreparedCorpus& prepared) {
    if (!path.empty()) {
        auto state = pretrain::load_encoder(path);
        prepared = pretrain::prepare_corpus(c, embed::SubwordEmbedder(state.subword));
        return state;
    }
    prepared = pretrain::prepare_corpus(c, embed::SubwordEmbedder(config.subword));
    return pretrain::make_encoder_state(config.subword, config.rgcn_config(), prepared.global_init, config.seed);
}

json name_metrics_json(const task::NameMetrics& m) {
    return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},     {"matched", m.matched},
            {"predicted", m.predicted}, {"gold", m.gold},     {"exact", m.exact}, {"methods", m.methods}};
}

json link_metrics_json(const task::LinkMetrics& m) {
    return {{"queries", m.queries},      {"mrr", m.mrr},           {"hit1", m.hit1},
            {"hit3", m.hit3},            {"hit10", m.hit10},       {"pos_mean", m.pos.mean},
            {"pos_std", m.pos.stddev},   {"neg_mean", m.neg.mean}, {"neg_std", m.neg.stddev},
            {"welch_t", m.welch.t},      {"welch_df", m.welch.df}, {"welch_p", m.welch.p}};
}

json record_head(const RunConfig& config, const corpus::Corpus& c, TaskKind task) {
    json r;
    r["task"] = std::string(to_string(task));
    const auto flavor = c.graphs.empty() ? config.flavor : c.graphs.front().flavor;
    r["flavor"] = std::string(graph::to_string(flavor));
    r["seed"] = config.seed;
    r["pooling"] = task == TaskKind::Name ? json(std::string(task::to_string(config.name.pooling))) : json();
    r["scorer"] = task == TaskKind::Link ? json(std::string(task::to_string(config.link.scorer))) : json();
    return r;
}

void print_flat(std::ostream& out, const json& j, const std::string& prefix) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (it->is_object()) {
            print_flat(out, *it, key);
        } else if (it->is_string()) {
            out << key << ": " << it->get<std::string>() << "\n";
        } else {
            out << key << ": " << it->dump() << "\n";
        }
    }
}

void write_record(const fs::path& path, const json& record, std::ostream& out) {
    auto f = open_out(path);
    f << format_record(record);
    print_flat(out, record, "");
    out << "record: " << path.string() << "\n";
}

}  // namespace

fs::path Paths::task_encoder(TaskKind t) const { return out / (std::string(to_string(t)) + "-encoder.ckpt"); }
fs::path Paths::task_head(TaskKind t) const { return out / (std::string(to_string(t)) + "-head.ckpt"); }
fs::path Paths::task_metrics(TaskKind t) const { return out / (std::string(to_string(t)) + "-metrics.json"); }
fs::path Paths::eval_metrics(TaskKind t, corpus::Split s) const {
    return out / (std::string(to_string(t)) + "-eval-" + std::string(corpus::to_string(s)) + ".json");
}

Paths resolve_paths(const RunConfig& config) {
    Paths p;
    if (!config.out.empty()) {
        p.out = config.out;
    } else if (const char* env = std::getenv(kOutEnv); env && *env) {
        p.out = env;
    } else {
        p.out = kDefaultOut;
    }
    p.manifest = config.manifest.empty() ? p.out / "manifest.tsv" : fs::path(config.manifest);
    p.splits = p.manifest.parent_path() / "splits.tsv";
    p.report = p.out / "build-report.tsv";
    p.encoder = p.out / "encoder.ckpt";
    p.checkpoints = p.out / "checkpoints";
    p.pretrain_log = p.out / "pretrain-log.jsonl";
    return p;
}

std::string format_record(const json& record) { return record.dump() + "\n"; }

int cmd_build(const RunConfig& config, std::ostream& out, std::ostream& err) {
    if (config.source.empty()) throw ConfigError("build needs --source");
    if (!fs::is_directory(config.source)) throw IoError("not a directory: " + config.source);
    const Paths paths = resolve_paths(config);
    const auto built = corpus::build_graphs_from_dir(config.source, config.flavor);

    const fs::path base = paths.manifest.parent_path();
    fs::create_directories(base.empty() ? fs::path(".") : base);
    fs::remove_all(base / "graphs");
    const std::string ext = "." + std::string(graph::to_string(config.flavor));
    std::vector<corpus::ManifestEntry> entries;
    for (std::size_t i = 0; i < built.graphs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%05zu", i);
        const std::string rel = "graphs/" + std::string(name) + ext;
        corpus::write_graph_file(base / rel, built.graphs[i]);
        entries.push_back({built.packages[i], rel});
    }
    corpus::write_manifest(paths.manifest, entries);

    std::set<std::string> packages(built.packages.begin(), built.packages.end());
    std::error_code ec;
    fs::remove(paths.splits, ec);
    if (packages.size() >= 3) {
        corpus::write_splits(paths.splits, corpus::split_packages({packages.begin(), packages.end()}, config.ratios,
                                                                  config.seed));
    }

    auto report = open_out(paths.report);
    for (const auto& issue : built.issues) {
        report << corpus::percent_encode(issue.origin) << '\t' << corpus::percent_encode(issue.message) << '\n';
        err << "error: " << issue.origin << ": " << issue.message << "\n";
    }
    out << "graphs: " << built.graphs.size() << "\n";
    out << "packages: " << packages.size() << "\n";
    out << "issues: " << built.issues.size() << "\n";
    out << "manifest: " << paths.manifest.string() << "\n";
    return built.issues.empty() ? 0 : 1;
}

int cmd_pretrain(const RunConfig& config, std::ostream& out) {
    const Paths paths = resolve_paths(config);
    const auto c = load(paths);
    if (c.graphs.empty()) throw ConfigError("corpus is empty");
    pretrain::PreparedCorpus prepared;
    auto state = encoder_for(config, config.checkpoint, c, prepared);

    auto log = open_out(paths.pretrain_log);
    pretrain::PretrainOptions options;
    options.checkpoint_dir = paths.checkpoints;
    options.max_steps = config.pretrain_max_steps;
    options.on_step = [&](const pretrain::StepRecord& s) {
        json j = {{"step", s.step}, {"epoch", s.epoch}, {"mrw", s.loss[0]}, {"him", s.loss[1]},
                  {"mt", s.loss[2]},  {"nt", s.loss[3]},  {"total", s.total}};
        log << format_record(j);
    };
    const auto result = pretrain::pretrain_run(prepared, split_ids(c, corpus::Split::Train), config.pretrain_config(),
                                               state, options);
    pretrain::save_encoder(paths.encoder, state);
    out << "steps: " << result.log.size() << "\n";
    if (!result.log.empty()) out << "final_loss: " << json(result.log.back().total).dump() << "\n";
    out << "encoder: " << paths.encoder.string() << "\n";
    return 0;
}

int cmd_finetune(const RunConfig& config, std::ostream& out) {
    const Paths paths = resolve_paths(config);
    const auto c = load(paths);
    if (c.graphs.empty()) throw ConfigError("corpus is empty");
    pretrain::PreparedCorpus prepared;
    auto state = encoder_for(config, config.checkpoint, c, prepared);
    json record = record_head(config, c, config.task);
    const fs::path head = config.head.empty() ? paths.task_head(config.task) : fs::path(config.head);
    if (config.task == TaskKind::Name) {
        const auto r = task::finetune_name(c, prepared, state, config.name_config());
        nn::save_checkpoint(head, task::name_model_checkpoint(r.model));
        record["best_epoch"] = r.best_epoch;
        record["metrics"] = {{"train", name_metrics_json(r.train)},
                             {"valid", name_metrics_json(r.valid)},
                             {"test", name_metrics_json(r.test)}};
    } else {
        const auto r = task::finetune_link(c, state, config.link_config());
        nn::save_checkpoint(head, task::link_model_checkpoint(r.model));
        record["final_loss"] = r.epoch_loss.empty() ? 0.0 : r.epoch_loss.back();
        record["metrics"] = {{"test", link_metrics_json(r.metrics)}};
    }
    pretrain::save_encoder(paths.task_encoder(config.task), state);
    write_record(paths.task_metrics(config.task), record, out);
    return 0;
}

int cmd_eval(const RunConfig& config, std::ostream& out) {
    const Paths paths = resolve_paths(config);
    const auto c = load(paths);
    const fs::path enc = config.checkpoint.empty() ? paths.task_encoder(config.task) : fs::path(config.checkpoint);
    const fs::path head = config.head.empty() ? paths.task_head(config.task) : fs::path(config.head);
    pretrain::PreparedCorpus prepared;
    auto state = encoder_for(config, enc, c, prepared);
    const auto ids = split_ids(c, config.split);
    json record = record_head(config, c, config.task);
    record["split"] = std::string(corpus::to_string(config.split));
    if (config.task == TaskKind::Name) {
        const auto model = task::name_model_from_checkpoint(nn::load_checkpoint(head));
        record["pooling"] = std::string(task::to_string(model.pooling));
        record["metrics"] = name_metrics_json(task::evaluate_names(prepared, ids, state, model));
    } else {
        const auto model = task::link_model_from_checkpoint(nn::load_checkpoint(head));
        record["scorer"] = std::string(task::to_string(model.kind));
        const auto data = task::prepare_link_data(c, state, split_ids(c, corpus::Split::Train), ids,
                                                  config.link.held_out_ratio, config.seed);
        record["metrics"] = link_metrics_json(
            task::evaluate_link(data, model, config.link.eval_negatives, task::link_eval_seed(config.seed)));
    }
    write_record(paths.eval_metrics(config.task, config.split), record, out);
    return 0;
}

int cmd_export(const RunConfig& config, std::ostream& out) {
    const Paths paths = resolve_paths(config);
    const auto c = load(paths);
    const fs::path enc = config.checkpoint.empty() ? paths.encoder : fs::path(config.checkpoint);
    pretrain::PreparedCorpus prepared;
    auto state = encoder_for(config, enc, c, prepared);
    const auto ids = all_ids(c);
    {
        auto f = open_out(paths.node_embeddings());
        task::export_node_embeddings(f, prepared, ids, state);
    }
    {
        auto f = open_out(paths.method_embeddings());
        task::export_method_embeddings(f, prepared, ids, state);
    }
    out << "graphs: " << ids.size() << "\n";
    out << "nodes: " << c.num_nodes() << "\n";
    out << "node_embeddings: " << paths.node_embeddings().string() << "\n";
    out << "method_embeddings: " << paths.method_embeddings().string() << "\n";
    return 0;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Program graphs, graph encoder pre-training and fine-tuning.", "codegraph"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "codegraph 1.0");

    const RunConfig defaults;
    struct Command {
        CLI::App* app;
        std::string config_file;
        std::map<std::string, std::string> values;
        std::map<std::string, CLI::Option*> options;
    };
    const std::vector<std::pair<std::string, std::string>> names = {
        {"build", "parse sources and write graph files, a manifest, splits and a validation report"},
        {"pretrain", "pre-train the encoder on the training split"},
        {"finetune", "train a name or link head and write its metrics record"},
        {"eval", "evaluate a trained head on one split"},
        {"export", "write node and method embeddings"}};
    std::map<std::string, Command> commands;
    for (const auto& [name, help] : names) {
        Command& cmd = commands[name];
        cmd.app = app.add_subcommand(name, help);
        cmd.app->add_option("--config", cmd.config_file, "key = value file applied before flags");
        for (const auto& key : config_keys()) {
            auto* opt = cmd.app->add_option("--" + key.name, cmd.values[key.name], key.help);
            const std::string def = key.get(defaults);
            opt->default_str(def.empty() ? "\"\"" : def)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
            cmd.options[key.name] = opt;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        for (auto& [name, cmd] : commands) {
            if (!cmd.app->parsed()) continue;
            RunConfig config;
            if (!cmd.config_file.empty()) apply_config_text(config, corpus::read_file(cmd.config_file));
            for (const auto& key : config_keys()) {
                if (cmd.options[key.name]->count() > 0) set_value(config, key.name, cmd.values[key.name]);
            }
            config.validate();
            if (name == "build") return cmd_build(config, out, err);
            if (name == "pretrain") return cmd_pretrain(config, out);
            if (name == "finetune") return cmd_finetune(config, out);
            if (name == "eval") return cmd_eval(config, out);
            return cmd_export(config, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace codegraph::cli
