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
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "codegraph/nn/tensor.hpp"

namespace codegraph::nn {

/// Named trainable tensors, iterated in name order.
class ParamStore {
public:
    Tensor add(const std::string& name, Mat init);
    /// Registers an existing tensor, sharing its storage.
    void insert(const std::string& name, const Tensor& t);
    Tensor get(const std::string& name) const;
    bool contains(const std::string& name) const { return params_.count(name) > 0; }
    const std::map<std::string, Tensor>& all() const { return params_; }
    std::size_t size() const { return params_.size(); }
    std::size_t num_scalars() const;
    void zero_grad();

private:
    std::map<std::string, Tensor> params_;
};

/// Uniform Glorot initialization, U[-a, a] with a = sqrt(6 / (rows + cols)).
Mat glorot(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Two affine layers with a rectifier between them.
class Mlp {
public:
    Mlp() = default;
    Mlp(ParamStore& store, const std::string& prefix, int in, int hidden, int out, Rng& rng);
    /// Binds to parameters already registered under `prefix`.
    static Mlp attach(const ParamStore& store, const std::string& prefix);

    Tensor forward(const Tensor& x) const;
    int in_dim() const { return in_; }
    int out_dim() const { return out_; }

    Tensor w1, b1, w2, b2;

private:
    int in_ = 0, out_ = 0;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    /// L2 strength; adds 2 * weight_decay * theta to every gradient.
    double weight_decay = 1e-4;
};

class Adam {
public:
    explicit Adam(AdamConfig config = {});

    /// Updates every parameter accepted by `trainable` (all when empty) from
    /// its accumulated gradient.
    void step(ParamStore& store, const std::function<bool(const std::string&)>& trainable = {});
    long steps() const { return t_; }
    const AdamConfig& config() const { return config_; }

private:
    AdamConfig config_;
    long t_ = 0;
    std::map<std::string, std::pair<Mat, Mat>> moments_;
};

}  // namespace codegraph::nn
