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

#include "codegraph/corpus/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace codegraph::corpus {

FormatError::FormatError(const std::string& message, std::size_t offset)
    : Error("format error at byte " + std::to_string(offset) + ": " + message), offset_(offset) {}

std::string percent_encode(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '%': out += "%25"; break;
            case '\t': out += "%09"; break;
            case '\n': out += "%0A"; break;
            case '\r': out += "%0D"; break;
            default: out += c;
        }
    }
    return out;
}

namespace {

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

std::string decode_at(std::string_view s, std::size_t base) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '%') {
            out += s[i];
            continue;
        }
        if (i + 2 >= s.size()) throw FormatError("truncated escape", base + i);
        const int hi = hex_value(s[i + 1]);
        const int lo = hex_value(s[i + 2]);
        if (hi < 0 || lo < 0) throw FormatError("bad escape", base + i);
        out += static_cast<char>(hi * 16 + lo);
        i += 2;
    }
    return out;
}

struct Field {
    std::string_view text;
    std::size_t offset;
};

std::vector<Field> split_tabs(std::string_view line, std::size_t base) {
    std::vector<Field> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == '\t') {
            out.push_back({line.substr(start, i - start), base + start});
            start = i + 1;
        }
    }
    return out;
}

int parse_int(const Field& f) {
    int v = 0;
    auto [p, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), v);
    if (ec != std::errc() || p != f.text.data() + f.text.size() || f.text.empty()) {
        throw FormatError("expected integer, found '" + std::string(f.text) + "'", f.offset);
    }
    return v;
}

}  // namespace

std::string percent_decode(std::string_view s) { return decode_at(s, 0); }

std::string serialize_graph(const graph::SigmaGraph& g) {
    std::ostringstream out;
    out << "SIGMA\t" << graph::to_string(g.flavor) << '\t' << percent_encode(g.method_id) << '\n';
    for (const auto& n : g.nodes) {
        out << "N\t" << n.id << '\t' << graph::to_string(n.ntype) << '\t' << percent_encode(n.feature);
        if (n.ast_kind) out << '\t' << percent_encode(*n.ast_kind);
        out << '\n';
    }
    for (const auto& e : g.edges) {
        out << "E\t" << e.src << '\t' << graph::to_string(e.etype) << '\t' << e.dst << '\n';
    }
    return out.str();
}

graph::SigmaGraph deserialize_graph(std::string_view bytes) {
    graph::SigmaGraph g;
    bool header = false;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        const std::size_t nl = bytes.find('\n', pos);
        if (nl == std::string_view::npos) throw FormatError("unterminated line", bytes.size());
        const std::string_view line = bytes.substr(pos, nl - pos);
        const auto fields = split_tabs(line, pos);
        const std::string_view tag = fields[0].text;
        if (!header) {
            if (tag != "SIGMA" || fields.size() != 3) throw FormatError("expected SIGMA header", pos);
            auto flavor = graph::parse_flavor(fields[1].text);
            if (!flavor) throw FormatError("unknown flavor '" + std::string(fields[1].text) + "'", fields[1].offset);
            g.flavor = *flavor;
            g.method_id = decode_at(fields[2].text, fields[2].offset);
            header = true;
        } else if (tag == "N") {
            if (!g.edges.empty()) throw FormatError("node line after edge lines", pos);
            const bool sigma1 = g.flavor == graph::Flavor::Sigma1;
            if (fields.size() != (sigma1 ? 5u : 4u)) {
                throw FormatError(sigma1 ? "sigma1 node line needs 5 fields" : "sigma0 node line needs 4 fields", pos);
            }
            graph::SigmaNode n;
            n.id = parse_int(fields[1]);
            if (n.id != g.num_nodes()) throw FormatError("node ids must be consecutive from 0", fields[1].offset);
            auto t = graph::parse_node_type(fields[2].text);
            if (!t) throw FormatError("unknown node type '" + std::string(fields[2].text) + "'", fields[2].offset);
            n.ntype = *t;
            n.feature = decode_at(fields[3].text, fields[3].offset);
            if (sigma1) n.ast_kind = decode_at(fields[4].text, fields[4].offset);
            g.nodes.push_back(std::move(n));
        } else if (tag == "E") {
            if (fields.size() != 4) throw FormatError("edge line needs 4 fields", pos);
            graph::SigmaEdge e;
            e.src = parse_int(fields[1]);
            auto t = graph::parse_edge_type(fields[2].text);
            if (!t) throw FormatError("unknown edge type '" + std::string(fields[2].text) + "'", fields[2].offset);
            e.etype = *t;
            e.dst = parse_int(fields[3]);
            if (e.src < 0 || e.src >= g.num_nodes()) throw FormatError("edge source out of range", fields[1].offset);
            if (e.dst < 0 || e.dst >= g.num_nodes()) throw FormatError("edge target out of range", fields[3].offset);
            g.edges.push_back(e);
        } else {
            throw FormatError("unknown line tag '" + std::string(tag) + "'", pos);
        }
        pos = nl + 1;
    }
    if (!header) throw FormatError("missing SIGMA header", 0);
    if (g.nodes.size() < 2) throw FormatError("graph needs entry and exit nodes", bytes.size());
    return g;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed for " + path.string());
}

void write_graph_file(const std::filesystem::path& path, const graph::SigmaGraph& g) {
    write_file(path, serialize_graph(g));
}

graph::SigmaGraph read_graph_file(const std::filesystem::path& path) {
    try {
        return deserialize_graph(read_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what(), e.offset());
    }
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
    std::string out;
    for (const auto& e : entries) out += percent_encode(e.package) + '\t' + percent_encode(e.graph_file) + '\n';
    write_file(path, out);
}

namespace {

template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string_view line(text.data() + pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) fn(line, pos);
        pos = nl + 1;
    }
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::vector<ManifestEntry> out;
    for_each_line(read_file(path), [&](std::string_view line, std::size_t pos) {
        auto f = split_tabs(line, pos);
        if (f.size() != 2) throw FormatError("manifest line needs 2 fields", pos);
        out.push_back({decode_at(f[0].text, f[0].offset), decode_at(f[1].text, f[1].offset)});
    });
    return out;
}

Corpus load_corpus(const std::filesystem::path& manifest) {
    const auto entries = read_manifest(manifest);
    const auto dir = manifest.parent_path();
    std::vector<graph::SigmaGraph> graphs;
    std::vector<std::string> packages;
    for (const auto& e : entries) {
        graphs.push_back(read_graph_file(dir / e.graph_file));
        packages.push_back(e.package);
    }
    return assemble_corpus(std::move(graphs), std::move(packages));
}

void write_splits(const std::filesystem::path& path, const std::map<std::string, Split>& splits) {
    std::string out;
    for (const auto& [pkg, s] : splits) out += percent_encode(pkg) + '\t' + std::string(to_string(s)) + '\n';
    write_file(path, out);
}

std::map<std::string, Split> read_splits(const std::filesystem::path& path) {
    std::map<std::string, Split> out;
    for_each_line(read_file(path), [&](std::string_view line, std::size_t pos) {
        auto f = split_tabs(line, pos);
        if (f.size() != 2) throw FormatError("split line needs 2 fields", pos);
        try {
            out[decode_at(f[0].text, f[0].offset)] = parse_split(f[1].text);
        } catch (const ConfigError&) {
            throw FormatError("unknown split '" + std::string(f[1].text) + "'", f[1].offset);
        }
    });
    return out;
}

}  // namespace codegraph::corpus
