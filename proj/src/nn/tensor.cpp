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

#include "codegraph/nn/tensor.hpp"

#include <cmath>
#include <unordered_set>

namespace codegraph::nn {

namespace detail {

void Node::accumulate(const Mat& g) {
    if (grad.size() == 0) {
        grad = g;
    } else {
        grad += g;
    }
}

}  // namespace detail

namespace {

using detail::Node;
using NodePtr = std::shared_ptr<Node>;

std::string shape(const Mat& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeMismatch(std::string(op) + ": " + shape(a.value()) + " vs " + shape(b.value()));
    }
}

Tensor make(Mat value, std::vector<Tensor> parents, std::function<void(Node&)> backward) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    for (const auto& p : parents) {
        if (p.requires_grad()) n->requires_grad = true;
        n->parents.push_back(p.node());
    }
    if (n->requires_grad) {
        n->backward = std::move(backward);
    } else {
        n->parents.clear();
    }
    return Tensor::from_node(std::move(n));
}

Node& parent(Node& n, std::size_t i) { return *n.parents[i]; }

double softplus_scalar(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
double sigmoid_scalar(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

Tensor Tensor::constant(Mat value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    return from_node(std::move(n));
}

Tensor Tensor::parameter(Mat value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = true;
    n->grad = Mat::Zero(n->value.rows(), n->value.cols());
    return from_node(std::move(n));
}

Tensor Tensor::from_node(std::shared_ptr<detail::Node> n) {
    Tensor t;
    t.node_ = std::move(n);
    return t;
}

double Tensor::item() const {
    if (rows() != 1 || cols() != 1) throw NotScalarLoss("tensor of shape " + shape(value()) + " is not a scalar");
    return value()(0, 0);
}

void Tensor::zero_grad() { node_->grad = Mat::Zero(node_->value.rows(), node_->value.cols()); }

void Tensor::backward() {
    if (rows() != 1 || cols() != 1) throw NotScalarLoss("backward needs a 1x1 loss, got " + shape(value()));
    if (!node_->requires_grad) return;
    // Iterative post-order DFS for a topological order.
    std::vector<Node*> order;
    std::unordered_set<Node*> seen;
    std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
    seen.insert(node_.get());
    while (!stack.empty()) {
        auto& [n, i] = stack.back();
        if (i < n->parents.size()) {
            Node* p = n->parents[i++].get();
            if (p->requires_grad && !seen.count(p)) {
                seen.insert(p);
                stack.push_back({p, 0});
            }
        } else {
            order.push_back(n);
            stack.pop_back();
        }
    }
    // Interior nodes start from zero; leaves keep accumulating.
    for (Node* n : order) {
        if (n->backward) n->grad = Mat::Zero(n->value.rows(), n->value.cols());
    }
    node_->grad = Mat::Constant(1, 1, 1.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward) n->backward(*n);
    }
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) throw ShapeMismatch("matmul: " + shape(a.value()) + " * " + shape(b.value()));
    return make(a.value() * b.value(), {a, b}, [](Node& n) {
        Node& pa = parent(n, 0);
        Node& pb = parent(n, 1);
        if (pa.requires_grad) pa.accumulate(n.grad * pb.value.transpose());
        if (pb.requires_grad) pb.accumulate(pa.value.transpose() * n.grad);
    });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    return make(a.value() + b.value(), {a, b}, [](Node& n) {
        for (auto& p : n.parents) {
            if (p->requires_grad) p->accumulate(n.grad);
        }
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    return make(a.value() - b.value(), {a, b}, [](Node& n) {
        if (parent(n, 0).requires_grad) parent(n, 0).accumulate(n.grad);
        if (parent(n, 1).requires_grad) parent(n, 1).accumulate(-n.grad);
    });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    return make(a.value().cwiseProduct(b.value()), {a, b}, [](Node& n) {
        Node& pa = parent(n, 0);
        Node& pb = parent(n, 1);
        if (pa.requires_grad) pa.accumulate(n.grad.cwiseProduct(pb.value));
        if (pb.requires_grad) pb.accumulate(n.grad.cwiseProduct(pa.value));
    });
}

Tensor scale(const Tensor& a, double s) {
    return make(a.value() * s, {a}, [s](Node& n) { parent(n, 0).accumulate(n.grad * s); });
}

Tensor add_rowvec(const Tensor& a, const Tensor& b) {
    if (b.rows() != 1 || b.cols() != a.cols()) {
        throw ShapeMismatch("add_rowvec: " + shape(a.value()) + " + " + shape(b.value()));
    }
    Mat out = a.value();
    out.rowwise() += b.value().row(0);
    return make(std::move(out), {a, b}, [](Node& n) {
        if (parent(n, 0).requires_grad) parent(n, 0).accumulate(n.grad);
        if (parent(n, 1).requires_grad) parent(n, 1).accumulate(n.grad.colwise().sum());
    });
}

Tensor mul_colvec(const Tensor& a, const Tensor& c) {
    if (c.cols() != 1 || c.rows() != a.rows()) {
        throw ShapeMismatch("mul_colvec: " + shape(a.value()) + " * " + shape(c.value()));
    }
    Mat out = a.value().array().colwise() * c.value().col(0).array();
    return make(std::move(out), {a, c}, [](Node& n) {
        Node& pa = parent(n, 0);
        Node& pc = parent(n, 1);
        if (pa.requires_grad) pa.accumulate(n.grad.array().colwise() * pc.value.col(0).array());
        if (pc.requires_grad) pc.accumulate(n.grad.cwiseProduct(pa.value).rowwise().sum());
    });
}

Tensor mul_rowvec(const Tensor& a, const Tensor& v) {
    if (v.rows() != 1 || v.cols() != a.cols()) {
        throw ShapeMismatch("mul_rowvec: " + shape(a.value()) + " * " + shape(v.value()));
    }
    Mat out = a.value().array().rowwise() * v.value().row(0).array();
    return make(std::move(out), {a, v}, [](Node& n) {
        Node& pa = parent(n, 0);
        Node& pv = parent(n, 1);
        if (pa.requires_grad) pa.accumulate(n.grad.array().rowwise() * pv.value.row(0).array());
        if (pv.requires_grad) pv.accumulate(n.grad.cwiseProduct(pa.value).colwise().sum());
    });
}

Tensor relu(const Tensor& a) {
    return make(a.value().cwiseMax(0.0), {a}, [](Node& n) {
        Node& p = parent(n, 0);
        p.accumulate((p.value.array() > 0.0).select(n.grad, 0.0));
    });
}

Tensor sigmoid(const Tensor& a) {
    Mat out = a.value().unaryExpr([](double x) { return sigmoid_scalar(x); });
    return make(out, {a}, [](Node& n) {
        parent(n, 0).accumulate(n.grad.cwiseProduct(n.value.cwiseProduct((1.0 - n.value.array()).matrix())));
    });
}

Tensor softplus(const Tensor& a) {
    Mat out = a.value().unaryExpr([](double x) { return softplus_scalar(x); });
    return make(std::move(out), {a}, [](Node& n) {
        Node& p = parent(n, 0);
        p.accumulate(n.grad.cwiseProduct(p.value.unaryExpr([](double x) { return sigmoid_scalar(x); })));
    });
}

Tensor log(const Tensor& a) {
    return make(a.value().array().log().matrix(), {a}, [](Node& n) {
        Node& p = parent(n, 0);
        p.accumulate(n.grad.cwiseQuotient(p.value));
    });
}

Tensor tanh(const Tensor& a) {
    return make(a.value().array().tanh().matrix(), {a}, [](Node& n) {
        parent(n, 0).accumulate(n.grad.cwiseProduct((1.0 - n.value.array().square()).matrix()));
    });
}

Tensor sum(const Tensor& a) {
    return make(Mat::Constant(1, 1, a.value().sum()), {a}, [](Node& n) {
        Node& p = parent(n, 0);
        p.accumulate(Mat::Constant(p.value.rows(), p.value.cols(), n.grad(0, 0)));
    });
}

Tensor mean(const Tensor& a) {
    const double count = static_cast<double>(a.value().size());
    if (count == 0) throw ShapeMismatch("mean of an empty tensor");
    return scale(sum(a), 1.0 / count);
}

Tensor row_dot(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "row_dot");
    Mat out = a.value().cwiseProduct(b.value()).rowwise().sum();
    return make(std::move(out), {a, b}, [](Node& n) {
        Node& pa = parent(n, 0);
        Node& pb = parent(n, 1);
        if (pa.requires_grad) pa.accumulate(pb.value.array().colwise() * n.grad.col(0).array());
        if (pb.requires_grad) pb.accumulate(pa.value.array().colwise() * n.grad.col(0).array());
    });
}

Tensor row_sqnorm(const Tensor& a) { return row_dot(a, a); }

Tensor mean_rows(const Tensor& a) {
    if (a.rows() == 0) throw ShapeMismatch("mean_rows of an empty tensor");
    const double r = static_cast<double>(a.rows());
    Mat out = a.value().colwise().sum() / r;
    return make(std::move(out), {a}, [r](Node& n) {
        Node& p = parent(n, 0);
        Mat g(p.value.rows(), p.value.cols());
        g.rowwise() = n.grad.row(0) / r;
        p.accumulate(g);
    });
}

Tensor gather_rows(const Tensor& a, const std::vector<int>& index) {
    Mat out(static_cast<Eigen::Index>(index.size()), a.cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] < 0 || index[i] >= a.rows()) throw ShapeMismatch("gather_rows: index out of range");
        out.row(static_cast<Eigen::Index>(i)) = a.value().row(index[i]);
    }
    return make(std::move(out), {a}, [index](Node& n) {
        Node& p = parent(n, 0);
        Mat g = Mat::Zero(p.value.rows(), p.value.cols());
        for (std::size_t i = 0; i < index.size(); ++i) g.row(index[i]) += n.grad.row(static_cast<Eigen::Index>(i));
        p.accumulate(g);
    });
}

Tensor scatter_add_rows(const Tensor& a, const std::vector<int>& index, Eigen::Index rows) {
    if (static_cast<Eigen::Index>(index.size()) != a.rows()) throw ShapeMismatch("scatter_add_rows: index size");
    Mat out = Mat::Zero(rows, a.cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] < 0 || index[i] >= rows) throw ShapeMismatch("scatter_add_rows: index out of range");
        out.row(index[i]) += a.value().row(static_cast<Eigen::Index>(i));
    }
    return make(std::move(out), {a}, [index](Node& n) {
        Node& p = parent(n, 0);
        Mat g(p.value.rows(), p.value.cols());
        for (std::size_t i = 0; i < index.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = n.grad.row(index[i]);
        p.accumulate(g);
    });
}

Tensor segment_mean(const Tensor& a, const std::vector<int>& segment, Eigen::Index segments) {
    std::vector<double> counts(static_cast<std::size_t>(segments), 0.0);
    for (int s : segment) {
        if (s < 0 || s >= segments) throw ShapeMismatch("segment_mean: segment out of range");
        counts[s] += 1.0;
    }
    Mat inv(a.rows(), 1);
    for (std::size_t i = 0; i < segment.size(); ++i) inv(static_cast<Eigen::Index>(i), 0) = 1.0 / counts[segment[i]];
    return scatter_add_rows(mul_colvec(a, Tensor::constant(std::move(inv))), segment, segments);
}

Tensor segment_softmax(const Tensor& scores, const std::vector<int>& segment, Eigen::Index segments) {
    if (scores.cols() != 1 || static_cast<Eigen::Index>(segment.size()) != scores.rows()) {
        throw ShapeMismatch("segment_softmax: expects a column vector with one segment id per row");
    }
    std::vector<double> maxv(static_cast<std::size_t>(segments), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < segment.size(); ++i) {
        maxv[segment[i]] = std::max(maxv[segment[i]], scores.value()(static_cast<Eigen::Index>(i), 0));
    }
    std::vector<double> denom(static_cast<std::size_t>(segments), 0.0);
    Mat out(scores.rows(), 1);
    for (std::size_t i = 0; i < segment.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        out(r, 0) = std::exp(scores.value()(r, 0) - maxv[segment[i]]);
        denom[segment[i]] += out(r, 0);
    }
    for (std::size_t i = 0; i < segment.size(); ++i) out(static_cast<Eigen::Index>(i), 0) /= denom[segment[i]];
    return make(std::move(out), {scores}, [segment, segments](Node& n) {
        std::vector<double> dot(static_cast<std::size_t>(segments), 0.0);
        for (std::size_t i = 0; i < segment.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            dot[segment[i]] += n.grad(r, 0) * n.value(r, 0);
        }
        Mat g(n.value.rows(), 1);
        for (std::size_t i = 0; i < segment.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            g(r, 0) = n.value(r, 0) * (n.grad(r, 0) - dot[segment[i]]);
        }
        parent(n, 0).accumulate(g);
    });
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows()) throw ShapeMismatch("concat_cols: " + shape(a.value()) + " | " + shape(b.value()));
    Mat out(a.rows(), a.cols() + b.cols());
    out << a.value(), b.value();
    const Eigen::Index ca = a.cols();
    return make(std::move(out), {a, b}, [ca](Node& n) {
        Node& pa = parent(n, 0);
        Node& pb = parent(n, 1);
        if (pa.requires_grad) pa.accumulate(n.grad.leftCols(ca));
        if (pb.requires_grad) pb.accumulate(n.grad.rightCols(n.grad.cols() - ca));
    });
}

Tensor spmm(const SpMat& s, const Tensor& a) {
    if (s.cols() != a.rows()) {
        throw ShapeMismatch("spmm: " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) + " * " +
                            shape(a.value()));
    }
    Mat out = s * a.value();
    return make(std::move(out), {a}, [s](Node& n) { parent(n, 0).accumulate(s.transpose() * n.grad); });
}

Tensor detach(const Tensor& a) { return Tensor::constant(a.value()); }

Tensor dropout(const Tensor& a, double rate, bool train, Rng& rng) {
    if (!train || rate <= 0.0) return a;
    if (rate >= 1.0) throw ConfigError("dropout rate must be below 1");
    const double keep = 1.0 - rate;
    Mat mask(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < mask.rows(); ++i) {
        for (Eigen::Index j = 0; j < mask.cols(); ++j) mask(i, j) = rng.uniform() < keep ? 1.0 / keep : 0.0;
    }
    return mul(a, Tensor::constant(std::move(mask)));
}

Mat softmax_rows(const Mat& logits) {
    Mat out(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double m = logits.row(i).maxCoeff();
        out.row(i) = (logits.row(i).array() - m).exp().matrix();
        out.row(i) /= out.row(i).sum();
    }
    return out;
}

Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& targets) {
    if (static_cast<Eigen::Index>(targets.size()) != logits.rows()) {
        throw ShapeMismatch("softmax_cross_entropy: one target per row required");
    }
    Mat probs = softmax_rows(logits.value());
    double loss = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0) continue;
        if (targets[i] >= logits.cols()) throw ShapeMismatch("softmax_cross_entropy: target out of range");
        const auto r = static_cast<Eigen::Index>(i);
        const double m = logits.value().row(r).maxCoeff();
        const double lse = m + std::log((logits.value().row(r).array() - m).exp().sum());
        loss += lse - logits.value()(r, targets[i]);
    }
    return make(Mat::Constant(1, 1, loss), {logits}, [probs, targets](Node& n) {
        Mat g = Mat::Zero(probs.rows(), probs.cols());
        for (std::size_t i = 0; i < targets.size(); ++i) {
            if (targets[i] < 0) continue;
            const auto r = static_cast<Eigen::Index>(i);
            g.row(r) = probs.row(r);
            g(r, targets[i]) -= 1.0;
        }
        parent(n, 0).accumulate(g * n.grad(0, 0));
    });
}

}  // namespace codegraph::nn
