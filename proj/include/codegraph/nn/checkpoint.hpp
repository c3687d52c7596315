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
#include <filesystem>
#include <map>
#include <string>

#include "codegraph/nn/modules.hpp"

namespace codegraph::nn {

class CheckpointError : public Error {
public:
    using Error::Error;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Named tensors plus a key/value manifest of the hyperparameters that
/// produced them.
struct Checkpoint {
    std::map<std::string, std::string> manifest;
    std::map<std::string, Mat> tensors;
};

/// Binary layout, all integers little-endian:
///   "CGCKPT\0\0" | u32 version | u32 manifest entries | (str key, str value)*
///   | u32 tensors | (str name, u64 rows, u64 cols, f64 data row-major)*
/// where str is a u32 byte length followed by the bytes.
std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies every parameter whose name starts with `prefix`.
Checkpoint snapshot(const ParamStore& store, const std::string& prefix = "");

/// Overwrites parameters of `store` from the checkpoint. Every parameter with
/// the prefix must be present with a matching shape.
void restore(ParamStore& store, const Checkpoint& ckpt, const std::string& prefix = "");

}  // namespace codegraph::nn
