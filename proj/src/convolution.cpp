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

#include "debut/convolution.hpp"

#include <string>

namespace debut {

using Idx = Eigen::Index;

Matrix tensor_to_matrix(const Tensor& t) {
    if (t.rank() != 2) throw Error(ErrorCode::ShapeMismatch, "expected a rank-2 tensor");
    Matrix m(static_cast<Idx>(t.dims[0]), static_cast<Idx>(t.dims[1]));
    for (std::size_t i = 0; i < t.dims[0]; ++i)
        for (std::size_t j = 0; j < t.dims[1]; ++j)
            m(static_cast<Idx>(i), static_cast<Idx>(j)) = t.data[i * t.dims[1] + j];
    return m;
}

Tensor matrix_to_tensor(const Matrix& m) {
    Tensor t({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
    for (Idx i = 0; i < m.rows(); ++i)
        for (Idx j = 0; j < m.cols(); ++j)
            t.data[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    return t;
}

namespace {

void require_feature(const Tensor& x) {
    if (x.rank() != 3) {
        throw Error(ErrorCode::ShapeMismatch,
                    "feature maps are H x W x C, got rank " + std::to_string(x.rank()));
    }
}

void require_kernel(const Tensor& k) {
    if (k.rank() != 4 || k.dims[0] != k.dims[1]) {
        throw Error(ErrorCode::ShapeMismatch, "kernels are k x k x C_i x C_o");
    }
}

}  // namespace

std::size_t conv_output_size(std::size_t in, std::size_t k, const ConvParams& cp) {
    if (cp.stride == 0) throw Error(ErrorCode::InvalidArgument, "stride must be positive");
    const std::size_t padded = in + 2 * cp.padding;
    if (padded < k || (padded - k) % cp.stride != 0) {
        throw Error(ErrorCode::NonIntegralOutput,
                    "input " + std::to_string(in) + " with k=" + std::to_string(k) +
                        ", stride=" + std::to_string(cp.stride) +
                        ", padding=" + std::to_string(cp.padding) + " gives no integral output size");
    }
    return (padded - k) / cp.stride + 1;
}

Matrix im2col(const Tensor& x, std::size_t k, const ConvParams& cp) {
    require_feature(x);
    const std::size_t h = x.dims[0], w = x.dims[1], c = x.dims[2];
    const std::size_t ho = conv_output_size(h, k, cp);
    const std::size_t wo = conv_output_size(w, k, cp);
    Matrix cols = Matrix::Zero(static_cast<Idx>(c * k * k), static_cast<Idx>(ho * wo));
    for (std::size_t oy = 0; oy < ho; ++oy) {
        for (std::size_t ox = 0; ox < wo; ++ox) {
            const Idx col = static_cast<Idx>(oy * wo + ox);
            for (std::size_t u = 0; u < k; ++u) {
                const long iy = static_cast<long>(oy * cp.stride + u) - static_cast<long>(cp.padding);
                if (iy < 0 || iy >= static_cast<long>(h)) continue;
                for (std::size_t v = 0; v < k; ++v) {
                    const long ix = static_cast<long>(ox * cp.stride + v) - static_cast<long>(cp.padding);
                    if (ix < 0 || ix >= static_cast<long>(w)) continue;
                    for (std::size_t ch = 0; ch < c; ++ch) {
                        cols(static_cast<Idx>(ch * k * k + u * k + v), col) =
                            x.at3(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), ch);
                    }
                }
            }
        }
    }
    return cols;
}

Matrix flatten_filters(const Tensor& kernel) {
    require_kernel(kernel);
    const std::size_t k = kernel.dims[0], ci = kernel.dims[2], co = kernel.dims[3];
    Matrix f(static_cast<Idx>(co), static_cast<Idx>(ci * k * k));
    for (std::size_t u = 0; u < k; ++u)
        for (std::size_t v = 0; v < k; ++v)
            for (std::size_t c = 0; c < ci; ++c)
                for (std::size_t o = 0; o < co; ++o)
                    f(static_cast<Idx>(o), static_cast<Idx>(c * k * k + u * k + v)) =
                        kernel.at4(u, v, c, o);
    return f;
}

Tensor unflatten_filters(const Matrix& f, std::size_t k, std::size_t c_in) {
    if (static_cast<std::size_t>(f.cols()) != c_in * k * k) {
        throw Error(ErrorCode::ShapeMismatch, "filter matrix width must be C_i * k^2");
    }
    const std::size_t co = static_cast<std::size_t>(f.rows());
    Tensor kernel({k, k, c_in, co});
    for (std::size_t u = 0; u < k; ++u)
        for (std::size_t v = 0; v < k; ++v)
            for (std::size_t c = 0; c < c_in; ++c)
                for (std::size_t o = 0; o < co; ++o)
                    kernel.at4(u, v, c, o) =
                        f(static_cast<Idx>(o), static_cast<Idx>(c * k * k + u * k + v));
    return kernel;
}

Tensor conv_direct(const Tensor& kernel, const Tensor& x, const ConvParams& cp) {
    require_kernel(kernel);
    require_feature(x);
    const std::size_t k = kernel.dims[0], ci = kernel.dims[2], co = kernel.dims[3];
    if (x.dims[2] != ci) {
        throw Error(ErrorCode::ShapeMismatch, "kernel expects " + std::to_string(ci) +
                                                  " input channels, got " + std::to_string(x.dims[2]));
    }
    const std::size_t h = x.dims[0], w = x.dims[1];
    const std::size_t ho = conv_output_size(h, k, cp);
    const std::size_t wo = conv_output_size(w, k, cp);
    Tensor out({ho, wo, co});
    for (std::size_t oy = 0; oy < ho; ++oy) {
        for (std::size_t ox = 0; ox < wo; ++ox) {
            for (std::size_t o = 0; o < co; ++o) {
                double acc = 0.0;
                for (std::size_t u = 0; u < k; ++u) {
                    const long iy = static_cast<long>(oy * cp.stride + u) - static_cast<long>(cp.padding);
                    if (iy < 0 || iy >= static_cast<long>(h)) continue;
                    for (std::size_t v = 0; v < k; ++v) {
                        const long ix = static_cast<long>(ox * cp.stride + v) - static_cast<long>(cp.padding);
                        if (ix < 0 || ix >= static_cast<long>(w)) continue;
                        for (std::size_t c = 0; c < ci; ++c)
                            acc += kernel.at4(u, v, c, o) *
                                   x.at3(static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), c);
                    }
                }
                out.at3(oy, ox, o) = acc;
            }
        }
    }
    return out;
}

Tensor panel_to_feature(const Matrix& panel, std::size_t h_out, std::size_t w_out) {
    if (static_cast<std::size_t>(panel.cols()) != h_out * w_out) {
        throw Error(ErrorCode::ShapeMismatch, "panel width must be H_o * W_o");
    }
    const std::size_t co = static_cast<std::size_t>(panel.rows());
    Tensor out({h_out, w_out, co});
    for (std::size_t pos = 0; pos < h_out * w_out; ++pos)
        for (std::size_t o = 0; o < co; ++o)
            out.data[pos * co + o] = panel(static_cast<Idx>(o), static_cast<Idx>(pos));
    return out;
}

Matrix feature_to_panel(const Tensor& feature) {
    require_feature(feature);
    const std::size_t positions = feature.dims[0] * feature.dims[1];
    const std::size_t c = feature.dims[2];
    Matrix panel(static_cast<Idx>(c), static_cast<Idx>(positions));
    for (std::size_t pos = 0; pos < positions; ++pos)
        for (std::size_t ch = 0; ch < c; ++ch)
            panel(static_cast<Idx>(ch), static_cast<Idx>(pos)) = feature.data[pos * c + ch];
    return panel;
}

namespace {

void check_chain_for_layer(const DeButChain& c, const Tensor& x, const LayerSpec& layer) {
    require_feature(x);
    const std::size_t kk = layer.k * layer.k;
    if (x.dims[2] != layer.c_in) {
        throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(x.dims[2]) +
                                                  " channels, layer expects " + std::to_string(layer.c_in));
    }
    if (c.cols() % kk != 0 || c.cols() / kk < layer.c_in || c.rows() < layer.c_out) {
        throw Error(ErrorCode::ShapeMismatch,
                    "chain of shape " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()) +
                        " cannot cover a layer with C_o=" + std::to_string(layer.c_out) +
                        ", C_i*k^2=" + std::to_string(layer.c_in * kk));
    }
}

}  // namespace

Tensor conv_via_chain(const DeButChain& c, const Tensor& x, const LayerSpec& layer,
                      const ConvParams& cp, std::uint64_t* macs) {
    check_chain_for_layer(c, x, layer);
    const std::size_t ho = conv_output_size(x.dims[0], layer.k, cp);
    const std::size_t wo = conv_output_size(x.dims[1], layer.k, cp);
    const Matrix cols = im2col(x, layer.k, cp);
    Matrix padded = Matrix::Zero(static_cast<Idx>(c.cols()), cols.cols());
    padded.topRows(cols.rows()) = cols;
    const Matrix out = apply_chain(c, padded, macs);
    return panel_to_feature(out.topRows(static_cast<Idx>(layer.c_out)), ho, wo);
}

Tensor conv_via_expanded(const DeButChain& c, const Tensor& x, const LayerSpec& layer,
                         const ConvParams& cp) {
    check_chain_for_layer(c, x, layer);
    const Matrix dense = expand_chain(c);
    const Matrix f = dense.topLeftCorner(static_cast<Idx>(layer.c_out),
                                         static_cast<Idx>(layer.c_in * layer.k * layer.k));
    return conv_direct(unflatten_filters(f, layer.k, layer.c_in), x, cp);
}

}  // namespace debut
