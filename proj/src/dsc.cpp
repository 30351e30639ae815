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

// The rightmost factor read as a (sub/exact/up-sampled) depthwise convolution,
// every later factor as a 1x1 convolution with some slice weights masked out.

#include <string>

#include "debut/convolution.hpp"

namespace debut {

using Idx = Eigen::Index;

std::string_view sampling_case_name(SamplingCase c) noexcept {
    switch (c) {
        case SamplingCase::SubSampling: return "SubSampling";
        case SamplingCase::Exact: return "Exact";
        case SamplingCase::UpSampling: return "UpSampling";
    }
    return "Unknown";
}

SamplingCase classify_rightmost(const DeButFactor& first, std::size_t k) {
    const std::size_t s = first.signature().s;
    const std::size_t kk = k * k;
    if (s < kk) return SamplingCase::SubSampling;
    if (s == kk) return SamplingCase::Exact;
    return SamplingCase::UpSampling;
}

std::vector<std::size_t> DscPlan::cross_channel_rows() const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < depthwise.rows.size(); ++i)
        if (depthwise.rows[i].cross_channel) rows.push_back(i);
    return rows;
}

std::vector<bool> DscPlan::pixel_coverage(std::size_t channel) const {
    std::vector<bool> seen(depthwise.k * depthwise.k, false);
    for (const auto& row : depthwise.rows)
        for (const auto& tap : row.taps)
            if (tap.channel == channel) seen[tap.pixel] = true;
    return seen;
}

DscPlan interpret_as_dsc(const DeButChain& c, const LayerSpec& layer) {
    const std::size_t kk = layer.k * layer.k;
    if (c.cols() % kk != 0 || c.cols() / kk < layer.c_in || c.rows() < layer.c_out) {
        throw Error(ErrorCode::ShapeMismatch, "chain does not match the layer geometry");
    }

    DscPlan plan;
    plan.layer = layer;

    const DeButFactor& first = c[0];
    const auto& sig = first.signature();
    auto& dw = plan.depthwise;
    dw.k = layer.k;
    dw.in_channels = c.cols() / kk;
    dw.kernels_per_channel = sig.r;
    dw.sampling = classify_rightmost(first, layer.k);
    dw.rows.resize(sig.p);
    for (std::size_t i = 0; i < sig.p; ++i) {
        auto& row = dw.rows[i];
        row.taps.reserve(sig.s);
        for (std::size_t slot = 0; slot < sig.s; ++slot) {
            const std::size_t col = nonzero_column(sig, i, slot);
            row.taps.push_back({col / kk, col % kk, first.values()[i * sig.s + slot]});
        }
        for (const auto& tap : row.taps)
            if (tap.channel != row.taps.front().channel) row.cross_channel = true;
    }

    for (std::size_t j = 1; j < c.size(); ++j) {
        const auto& f = c[j];
        const auto& fs = f.signature();
        PointwiseStage stage;
        stage.in_slices = fs.q;
        stage.rows.resize(fs.p);
        for (std::size_t i = 0; i < fs.p; ++i) {
            auto& row = stage.rows[i];
            row.slices = row_columns(fs, i);
            row.weights.assign(f.values().begin() + static_cast<long>(i * fs.s),
                               f.values().begin() + static_cast<long>((i + 1) * fs.s));
        }
        plan.pointwise.push_back(std::move(stage));
    }
    return plan;
}

Tensor apply_dsc(const DscPlan& plan, const Tensor& x, const ConvParams& cp) {
    if (x.rank() != 3 || x.dims[2] != plan.layer.c_in) {
        throw Error(ErrorCode::ShapeMismatch, "input does not match the plan's layer");
    }
    const auto& dw = plan.depthwise;
    const std::size_t k = dw.k;
    const std::size_t h = x.dims[0], w = x.dims[1], cin = x.dims[2];
    const std::size_t ho = conv_output_size(h, k, cp);
    const std::size_t wo = conv_output_size(w, k, cp);
    const std::size_t positions = ho * wo;

    // Depthwise stage: every row slides its taps over one (or two) channels.
    Matrix cur(static_cast<Idx>(dw.rows.size()), static_cast<Idx>(positions));
    for (std::size_t oy = 0; oy < ho; ++oy) {
        for (std::size_t ox = 0; ox < wo; ++ox) {
            const std::size_t pos = oy * wo + ox;
            for (std::size_t i = 0; i < dw.rows.size(); ++i) {
                double acc = 0.0;
                for (const auto& tap : dw.rows[i].taps) {
                    const std::size_t u = tap.pixel / k, v = tap.pixel % k;
                    const long iy = static_cast<long>(oy * cp.stride + u) - static_cast<long>(cp.padding);
                    const long ix = static_cast<long>(ox * cp.stride + v) - static_cast<long>(cp.padding);
                    double value = 0.0;
                    if (tap.channel < cin && iy >= 0 && iy < static_cast<long>(h) && ix >= 0 &&
                        ix < static_cast<long>(w)) {
                        value = x.at3(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), tap.channel);
                    }
                    acc += tap.weight * value;
                }
                cur(static_cast<Idx>(i), static_cast<Idx>(pos)) = acc;
            }
        }
    }

    // Masked pointwise stages.
    for (const auto& stage : plan.pointwise) {
        if (static_cast<std::size_t>(cur.rows()) != stage.in_slices) {
            throw Error(ErrorCode::ShapeMismatch, "pointwise stage slice count mismatch");
        }
        Matrix next(static_cast<Idx>(stage.rows.size()), static_cast<Idx>(positions));
        for (std::size_t pos = 0; pos < positions; ++pos) {
            const double* in = cur.col(static_cast<Idx>(pos)).data();
            for (std::size_t i = 0; i < stage.rows.size(); ++i) {
                const auto& row = stage.rows[i];
                double acc = 0.0;
                for (std::size_t n = 0; n < row.slices.size(); ++n) acc += row.weights[n] * in[row.slices[n]];
                next(static_cast<Idx>(i), static_cast<Idx>(pos)) = acc;
            }
        }
        cur = std::move(next);
    }
    return panel_to_feature(cur.topRows(static_cast<Idx>(plan.layer.c_out)), ho, wo);
}

}  // namespace debut
