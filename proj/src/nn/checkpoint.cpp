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

#include "codegraph/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace codegraph::nn {

namespace {

constexpr char kMagic[8] = {'C', 'G', 'C', 'K', 'P', 'T', '\0', '\0'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

void put_str(std::string& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out += s;
}

class Reader {
public:
    explicit Reader(const std::string& b) : b_(b) {}

    void need(std::size_t n) const {
        if (pos_ + n > b_.size()) throw CheckpointError("checkpoint truncated at byte " + std::to_string(pos_));
    }
    std::uint64_t uint(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }
    std::string str() {
        const auto n = static_cast<std::size_t>(uint(4));
        need(n);
        std::string s = b_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::string raw(std::size_t n) {
        need(n);
        std::string s = b_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == b_.size(); }

private:
    const std::string& b_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string encode_checkpoint(const Checkpoint& ckpt) {
    std::string out(kMagic, sizeof kMagic);
    put_u32(out, kCheckpointVersion);
    put_u32(out, static_cast<std::uint32_t>(ckpt.manifest.size()));
    for (const auto& [k, v] : ckpt.manifest) {
        put_str(out, k);
        put_str(out, v);
    }
    put_u32(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, m] : ckpt.tensors) {
        put_str(out, name);
        put_u64(out, static_cast<std::uint64_t>(m.rows()));
        put_u64(out, static_cast<std::uint64_t>(m.cols()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                std::uint64_t bits;
                const double d = m(i, j);
                std::memcpy(&bits, &d, sizeof bits);
                put_u64(out, bits);
            }
        }
    }
    return out;
}

Checkpoint decode_checkpoint(const std::string& bytes) {
    Reader r(bytes);
    if (r.raw(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) throw CheckpointError("not a checkpoint file");
    const auto version = static_cast<std::uint32_t>(r.uint(4));
    if (version != kCheckpointVersion) {
        throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                              std::to_string(kCheckpointVersion) + ")");
    }
    Checkpoint c;
    const auto entries = r.uint(4);
    for (std::uint64_t i = 0; i < entries; ++i) {
        std::string k = r.str();
        c.manifest[k] = r.str();
    }
    const auto tensors = r.uint(4);
    for (std::uint64_t t = 0; t < tensors; ++t) {
        std::string name = r.str();
        const auto rows = r.uint(8);
        const auto cols = r.uint(8);
        r.need(static_cast<std::size_t>(rows * cols * 8));
        Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                const std::uint64_t bits = r.uint(8);
                std::memcpy(&m(i, j), &bits, sizeof bits);
            }
        }
        c.tensors[name] = std::move(m);
    }
    if (!r.done()) throw CheckpointError("trailing bytes after checkpoint");
    return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    const std::string bytes = encode_checkpoint(ckpt);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read " + path.string());
    std::ostringstream s;
    s << f.rdbuf();
    try {
        return decode_checkpoint(s.str());
    } catch (const CheckpointError& e) {
        throw CheckpointError(path.string() + ": " + e.what());
    }
}

Checkpoint snapshot(const ParamStore& store, const std::string& prefix) {
    Checkpoint c;
    for (const auto& [name, t] : store.all()) {
        if (name.rfind(prefix, 0) == 0) c.tensors[name] = t.value();
    }
    return c;
}

void restore(ParamStore& store, const Checkpoint& ckpt, const std::string& prefix) {
    for (const auto& [name, t] : store.all()) {
        if (name.rfind(prefix, 0) != 0) continue;
        auto it = ckpt.tensors.find(name);
        if (it == ckpt.tensors.end()) throw CheckpointError("checkpoint lacks tensor '" + name + "'");
        if (it->second.rows() != t.rows() || it->second.cols() != t.cols()) {
            throw CheckpointError("tensor '" + name + "' has shape " + std::to_string(it->second.rows()) + "x" +
                                  std::to_string(it->second.cols()) + ", expected " + std::to_string(t.rows()) +
                                  "x" + std::to_string(t.cols()));
        }
        Tensor h = t;
        h.mutable_value() = it->second;
    }
}

}  // namespace codegraph::nn
