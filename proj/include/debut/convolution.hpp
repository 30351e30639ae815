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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "debut/chain.hpp"
#include "debut/layer.hpp"
#include "debut/tensor.hpp"

namespace debut {

/// Cross-correlation geometry (no kernel flip).
struct ConvParams {
    std::size_t stride = 1;
    std::size_t padding = 0;
};

/// (H + 2 pad - k) / stride + 1; throws NonIntegralOutput.
std::size_t conv_output_size(std::size_t in, std::size_t k, const ConvParams& cp);

/// (C k^2) x (H_o W_o). Row c*k^2 + u*k + v, column h_o*W_o + w_o.
Matrix im2col(const Tensor& x, std::size_t k, const ConvParams& cp = {});

/// k x k x C_i x C_o kernel -> C_o x (C_i k^2), columns ordered like im2col rows.
Matrix flatten_filters(const Tensor& kernel);
Tensor unflatten_filters(const Matrix& f, std::size_t k, std::size_t c_in);

/// Sliding-window reference convolution, H_o x W_o x C_o.
Tensor conv_direct(const Tensor& kernel, const Tensor& x, const ConvParams& cp = {});

/// C_o x (H_o W_o) panel -> H_o x W_o x C_o tensor.
Tensor panel_to_feature(const Matrix& panel, std::size_t h_out, std::size_t w_out);
Matrix feature_to_panel(const Tensor& feature);

/// im2col, zero-pad rows up to the chain width, apply the chain factor by
/// factor, drop padded output rows.
Tensor conv_via_chain(const DeButChain& c, const Tensor& x, const LayerSpec& layer,
                      const ConvParams& cp = {}, std::uint64_t* macs = nullptr);

/// Convolution with the dense filter obtained by expanding the chain.
Tensor conv_via_expanded(const DeButChain& c, const Tensor& x, const LayerSpec& layer,
                         const ConvParams& cp = {});

enum class SamplingCase { SubSampling, Exact, UpSampling };

std::string_view sampling_case_name(SamplingCase c) noexcept;

SamplingCase classify_rightmost(const DeButFactor& first, std::size_t k);

// Depthwise / masked-pointwise reading of a chain.

struct DepthwiseTap {
    std::size_t channel;
    std::size_t pixel;  // u*k + v
    double weight;
};

struct DepthwiseRow {
    std::vector<DepthwiseTap> taps;
    /// Taps span more than one input channel.
    bool cross_channel = false;
};

struct DepthwiseStage {
    std::size_t k = 1;
    std::size_t in_channels = 0;  // padded
    std::size_t kernels_per_channel = 1;
    SamplingCase sampling = SamplingCase::Exact;
    std::vector<DepthwiseRow> rows;
};

struct PointwiseRow {
    std::vector<std::size_t> slices;
    std::vector<double> weights;
};

struct PointwiseStage {
    std::size_t in_slices = 0;
    std::vector<PointwiseRow> rows;
};

struct DscPlan {
    LayerSpec layer;
    DepthwiseStage depthwise;
    std::vector<PointwiseStage> pointwise;

    /// Rows of the depthwise stage that mix more than one channel.
    std::vector<std::size_t> cross_channel_rows() const;
    /// Window pixels of `channel` touched by at least one depthwise row.
    std::vector<bool> pixel_coverage(std::size_t channel) const;
};

DscPlan interpret_as_dsc(const DeButChain& c, const LayerSpec& layer);

/// Depthwise sliding-window stage followed by masked 1x1 stages.
Tensor apply_dsc(const DscPlan& plan, const Tensor& x, const ConvParams& cp = {});

// Feature distance.

struct LayerOperator {
    std::variant<Matrix, DeButChain> op;
    LayerSpec layer;
    ConvParams conv;

    std::size_t rows() const;
    std::size_t cols() const;
};

/// Product form: op_L (... (op_1 X)). Layers are given in application order.
Matrix feature_forward_matrix(const std::vector<LayerOperator>& model, const Matrix& x);

/// Convolution per layer with a fresh im2col in between; returns the final
/// C_o x (H_o W_o) panel.
Matrix feature_forward_spatial(const std::vector<LayerOperator>& model, const Tensor& x);

enum class KlMode {
    Softmax,  ///< per-column softmax, temperature 1
    Raw,      ///< clamp to a small positive floor, renormalize per column
};

/// Mean over columns of KL(P_a || P_b) after per-column normalization.
double kl_feature_distance(const Matrix& a, const Matrix& b, KlMode mode = KlMode::Softmax);

}  // namespace debut
