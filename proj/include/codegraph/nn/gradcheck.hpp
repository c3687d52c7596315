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
#include <utility>
#include <vector>

#include "codegraph/nn/tensor.hpp"

namespace codegraph::nn {

struct GradCheckOptions {
    double step = 1e-5;
    double tolerance = 1e-4;
    /// Tensors with at most this many entries are checked coordinate by
    /// coordinate; larger ones on sampled coordinates and random directions.
    Eigen::Index full_check_limit = 64;
    int sampled_coordinates = 16;
    int random_directions = 4;
    /// Lower bound of the relative-error denominator.
    double floor = 1e-6;
    std::uint64_t seed = 1;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst;
    int checks = 0;
    bool passed = true;
};

/// Compares reverse-mode gradients of `loss` with central differences.
/// `loss` must rebuild the tape from the current parameter values on each
/// call and be deterministic.
GradCheckReport grad_check(const std::function<Tensor()>& loss,
                           const std::vector<std::pair<std::string, Tensor>>& params,
                           const GradCheckOptions& options = {});

}  // namespace codegraph::nn
