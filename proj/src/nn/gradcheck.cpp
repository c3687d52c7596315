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

#include "codegraph/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace codegraph::nn {

namespace {

double rel_error(double analytic, double numeric, double floor) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Central difference of `loss` along `dir` applied to `param`.
double directional(const std::function<Tensor()>& loss, Tensor param, const Mat& dir, double h) {
    Mat& v = param.mutable_value();
    const Mat saved = v;
    v = saved + h * dir;
    const double plus = loss().item();
    v = saved - h * dir;
    const double minus = loss().item();
    v = saved;
    return (plus - minus) / (2.0 * h);
}

}  // namespace

GradCheckReport grad_check(const std::function<Tensor()>& loss,
                           const std::vector<std::pair<std::string, Tensor>>& params,
                           const GradCheckOptions& options) {
    for (const auto& [name, p] : params) {
        Tensor t = p;
        t.zero_grad();
    }
    Tensor l = loss();
    l.backward();
    std::vector<Mat> analytic;
    for (const auto& [name, p] : params) analytic.push_back(p.grad());

    GradCheckReport report;
    Rng rng(options.seed);
    auto check = [&](const std::string& label, Tensor param, const Mat& dir, double a) {
        double err = rel_error(a, directional(loss, param, dir, options.step), options.floor);
        // A rectifier kink inside the stencil spoils the difference and
        // cancellation swamps tiny gradients of large losses; a smaller and a
        // larger step tell both apart from a wrong gradient.
        if (err > options.tolerance * 0.1) {
            err = std::min(err, rel_error(a, directional(loss, param, dir, options.step * 0.01), options.floor));
            err = std::min(err, rel_error(a, directional(loss, param, dir, options.step * 100), options.floor));
        }
        ++report.checks;
        if (err > report.max_rel_error) {
            report.max_rel_error = err;
            report.worst = label;
        }
    };

    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto& [name, p] = params[k];
        const Mat& g = analytic[k];
        const Eigen::Index rows = p.rows(), cols = p.cols(), size = rows * cols;
        if (size == 0) continue;
        auto unit = [&](Eigen::Index idx) {
            Mat d = Mat::Zero(rows, cols);
            d(idx / cols, idx % cols) = 1.0;
            return d;
        };
        if (size <= options.full_check_limit) {
            for (Eigen::Index idx = 0; idx < size; ++idx) {
                check(name + "[" + std::to_string(idx) + "]", p, unit(idx), g(idx / cols, idx % cols));
            }
            continue;
        }
        for (int s = 0; s < options.sampled_coordinates; ++s) {
            const auto idx = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(size)));
            check(name + "[" + std::to_string(idx) + "]", p, unit(idx), g(idx / cols, idx % cols));
        }
        for (int s = 0; s < options.random_directions; ++s) {
            Mat d(rows, cols);
            for (Eigen::Index i = 0; i < size; ++i) d(i / cols, i % cols) = rng.uniform(-1.0, 1.0);
            d /= d.norm();
            check(name + "<dir" + std::to_string(s) + ">", p, d, g.cwiseProduct(d).sum());
        }
    }
    report.passed = report.max_rel_error < options.tolerance;
    return report;
}

}  // namespace codegraph::nn
