/*
 * Copyright 2026 The DeBut Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <string>

#include "debut/convolution.hpp"

namespace debut {

using Idx = Eigen::Index;

std::size_t LayerOperator::rows() const {
    if (const auto* m = std::get_if<Matrix>(&op)) return static_cast<std::size_t>(m->rows());
    return std::get<DeButChain>(op).rows();
}

std::size_t LayerOperator::cols() const {
    if (const auto* m = std::get_if<Matrix>(&op)) return static_cast<std::size_t>(m->cols());
    return std::get<DeButChain>(op).cols();
}

Matrix feature_forward_matrix(const std::vector<LayerOperator>& model, const Matrix& x) {
    Matrix cur = x;
    for (std::size_t l = 0; l < model.size(); ++l) {
        const auto& layer = model[l];
        if (layer.cols() != static_cast<std::size_t>(cur.rows())) {
            throw Error(ErrorCode::ShapeMismatch,
                        "layer " + std::to_string(l + 1) + " expects " + std::to_string(layer.cols()) +
                            " rows, got " + std::to_string(cur.rows()));
        }
        if (const auto* m = std::get_if<Matrix>(&layer.op)) {
            cur = (*m) * cur;
        } else {
            cur = apply_chain(std::get<DeButChain>(layer.op), cur);
        }
    }
    return cur;
}

Matrix feature_forward_spatial(const std::vector<LayerOperator>& model, const Tensor& x) {
    if (model.empty()) throw Error(ErrorCode::InvalidArgument, "model has no layers");
    Tensor cur = x;
    for (const auto& layer : model) {
        if (const auto* m = std::get_if<Matrix>(&layer.op)) {
            const Idx width = static_cast<Idx>(layer.layer.c_in * layer.layer.k * layer.layer.k);
            if (m->rows() < static_cast<Idx>(layer.layer.c_out) || m->cols() < width) {
                throw Error(ErrorCode::ShapeMismatch, "dense operator smaller than its layer");
            }
            const Matrix f = m->topLeftCorner(static_cast<Idx>(layer.layer.c_out), width);
            cur = conv_direct(unflatten_filters(f, layer.layer.k, layer.layer.c_in), cur, layer.conv);
        } else {
            cur = conv_via_chain(std::get<DeButChain>(layer.op), cur, layer.layer, layer.conv);
        }
    }
    return feature_to_panel(cur);
}

namespace {

// Per-column log-probabilities.
Matrix log_normalize(const Matrix& a, KlMode mode) {
    Matrix out(a.rows(), a.cols());
    for (Idx j = 0; j < a.cols(); ++j) {
        if (mode == KlMode::Softmax) {
            const double mx = a.col(j).maxCoeff();
            double sum = 0.0;
            for (Idx i = 0; i < a.rows(); ++i) sum += std::exp(a(i, j) - mx);
            const double lse = mx + std::log(sum);
            for (Idx i = 0; i < a.rows(); ++i) out(i, j) = a(i, j) - lse;
        } else {
            constexpr double floor = 1e-12;
            double sum = 0.0;
            for (Idx i = 0; i < a.rows(); ++i) sum += std::max(a(i, j), floor);
            for (Idx i = 0; i < a.rows(); ++i) out(i, j) = std::log(std::max(a(i, j), floor) / sum);
        }
    }
    return out;
}

}  // namespace

double kl_feature_distance(const Matrix& a, const Matrix& b, KlMode mode) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "feature matrices differ in shape");
    }
    if (a.size() == 0) return 0.0;
    const Matrix la = log_normalize(a, mode);
    const Matrix lb = log_normalize(b, mode);
    double total = 0.0;
    for (Idx j = 0; j < a.cols(); ++j) {
        double d = 0.0;
        for (Idx i = 0; i < a.rows(); ++i) d += std::exp(la(i, j)) * (la(i, j) - lb(i, j));
        total += std::max(d, 0.0);
    }
    return total / static_cast<double>(a.cols());
}

}  // namespace debut
