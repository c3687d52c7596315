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

#include "codegraph/nn/modules.hpp"

#include <cmath>

namespace codegraph::nn {

Tensor ParamStore::add(const std::string& name, Mat init) {
    if (params_.count(name)) throw InternalError("parameter '" + name + "' registered twice");
    Tensor t = Tensor::parameter(std::move(init));
    params_.emplace(name, t);
    return t;
}

void ParamStore::insert(const std::string& name, const Tensor& t) {
    if (params_.count(name)) throw InternalError("parameter '" + name + "' registered twice");
    params_.emplace(name, t);
}

Tensor ParamStore::get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw InternalError("unknown parameter '" + name + "'");
    return it->second;
}

std::size_t ParamStore::num_scalars() const {
    std::size_t n = 0;
    for (const auto& [k, t] : params_) n += static_cast<std::size_t>(t.value().size());
    return n;
}

void ParamStore::zero_grad() {
    for (auto& [k, t] : params_) {
        Tensor h = t;
        h.zero_grad();
    }
}

Mat glorot(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-a, a);
    }
    return m;
}

Mlp::Mlp(ParamStore& store, const std::string& prefix, int in, int hidden, int out, Rng& rng) : in_(in), out_(out) {
    w1 = store.add(prefix + ".w1", glorot(in, hidden, rng));
    b1 = store.add(prefix + ".b1", Mat::Zero(1, hidden));
    w2 = store.add(prefix + ".w2", glorot(hidden, out, rng));
    b2 = store.add(prefix + ".b2", Mat::Zero(1, out));
}

Mlp Mlp::attach(const ParamStore& store, const std::string& prefix) {
    Mlp m;
    m.w1 = store.get(prefix + ".w1");
    m.b1 = store.get(prefix + ".b1");
    m.w2 = store.get(prefix + ".w2");
    m.b2 = store.get(prefix + ".b2");
    m.in_ = static_cast<int>(m.w1.rows());
    m.out_ = static_cast<int>(m.w2.cols());
    return m;
}

Tensor Mlp::forward(const Tensor& x) const {
    if (x.cols() != in_) {
        throw ShapeMismatch("mlp expects " + std::to_string(in_) + " input columns, got " + std::to_string(x.cols()));
    }
    return add_rowvec(matmul(relu(add_rowvec(matmul(x, w1), b1)), w2), b2);
}

Adam::Adam(AdamConfig config) : config_(config) {
    if (config_.lr <= 0) throw ConfigError("learning rate must be positive");
    if (config_.weight_decay < 0) throw ConfigError("weight decay must be non-negative");
}

void Adam::step(ParamStore& store, const std::function<bool(const std::string&)>& trainable) {
    ++t_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
    for (const auto& [name, param] : store.all()) {
        if (trainable && !trainable(name)) continue;
        Tensor p = param;
        Mat& theta = p.mutable_value();
        Mat g = p.grad();
        if (g.size() == 0) g = Mat::Zero(theta.rows(), theta.cols());
        if (config_.weight_decay > 0) g += 2.0 * config_.weight_decay * theta;
        auto it = moments_.find(name);
        if (it == moments_.end()) {
            it = moments_.emplace(name, std::make_pair(Mat::Zero(theta.rows(), theta.cols()),
                                                       Mat::Zero(theta.rows(), theta.cols())))
                     .first;
        }
        Mat& m = it->second.first;
        Mat& v = it->second.second;
        m = config_.beta1 * m + (1.0 - config_.beta1) * g;
        v = config_.beta2 * v + (1.0 - config_.beta2) * g.cwiseProduct(g);
        theta.array() -= config_.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + config_.eps);
    }
}

}  // namespace codegraph::nn
