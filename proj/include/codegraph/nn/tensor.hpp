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

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "codegraph/common/error.hpp"
#include "codegraph/common/rng.hpp"

namespace codegraph::nn {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class NotScalarLoss : public Error {
public:
    using Error::Error;
};

namespace detail {

struct Node {
    Mat value;
    Mat grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    /// Propagates `grad` of this node into the grads of its parents.
    std::function<void(Node&)> backward;

    void accumulate(const Mat& g);
};

}  // namespace detail

/// A node of the reverse-mode tape. Copies share the node.
class Tensor {
public:
    Tensor() = default;

    /// Constant (no gradient).
    static Tensor constant(Mat value);
    /// Trainable leaf.
    static Tensor parameter(Mat value);

    bool defined() const { return node_ != nullptr; }
    const Mat& value() const { return node_->value; }
    Mat& mutable_value() { return node_->value; }
    const Mat& grad() const { return node_->grad; }
    Mat& mutable_grad() { return node_->grad; }
    bool requires_grad() const { return node_ && node_->requires_grad; }
    Eigen::Index rows() const { return node_->value.rows(); }
    Eigen::Index cols() const { return node_->value.cols(); }
    double item() const;

    /// Zeroes the gradient buffer (leaves keep theirs between backward calls).
    void zero_grad();

    /// Reverse pass from a 1x1 tensor; accumulates into every reachable
    /// tensor that requires a gradient.
    void backward();

    const std::shared_ptr<detail::Node>& node() const { return node_; }
    static Tensor from_node(std::shared_ptr<detail::Node> n);

private:
    std::shared_ptr<detail::Node> node_;
};

// Elementwise and linear algebra.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
/// a (n x d) + b (1 x d) broadcast over rows.
Tensor add_rowvec(const Tensor& a, const Tensor& b);
/// a (n x d) * c (n x 1) broadcast over columns.
Tensor mul_colvec(const Tensor& a, const Tensor& c);
/// a (n x d) * v (1 x d) broadcast over rows.
Tensor mul_rowvec(const Tensor& a, const Tensor& v);
Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor log(const Tensor& a);
Tensor tanh(const Tensor& a);

// Reductions.
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
/// Row-wise sum of a*b: (n x d, n x d) -> n x 1.
Tensor row_dot(const Tensor& a, const Tensor& b);
Tensor row_sqnorm(const Tensor& a);
/// Mean over rows: n x d -> 1 x d.
Tensor mean_rows(const Tensor& a);

// Indexing.
Tensor gather_rows(const Tensor& a, const std::vector<int>& index);
/// out[index[i]] += a[i]; out has `rows` rows.
Tensor scatter_add_rows(const Tensor& a, const std::vector<int>& index, Eigen::Index rows);
/// Per-segment mean of rows; empty segments give zero rows.
Tensor segment_mean(const Tensor& a, const std::vector<int>& segment, Eigen::Index segments);
/// Softmax of a column vector within each segment.
Tensor segment_softmax(const Tensor& scores, const std::vector<int>& segment, Eigen::Index segments);
Tensor concat_cols(const Tensor& a, const Tensor& b);
/// s * a for a constant sparse matrix s.
Tensor spmm(const SpMat& s, const Tensor& a);

Tensor detach(const Tensor& a);

/// Inverted dropout; identity when `train` is false or rate is 0.
Tensor dropout(const Tensor& a, double rate, bool train, Rng& rng);

/// Sum over rows of -log softmax(logits)[target]. Rows whose target is
/// negative are skipped.
Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& targets);

/// Row-wise softmax (no gradient), for decoding.
Mat softmax_rows(const Mat& logits);

}  // namespace codegraph::nn
