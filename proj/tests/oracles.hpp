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

// Reference implementations used only by the tests. They are written from the
// definitions (brute force over all cells, explicit windows, explicit design
// matrices) and share no code with the library beyond the data containers.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "debut/chain.hpp"
#include "debut/tensor.hpp"

namespace oracle {

using debut::FactorSignature;
using debut::Matrix;
using debut::Tensor;

inline bool in_mask(const FactorSignature& s, std::size_t i, std::size_t j) {
    const std::size_t rt = s.r * s.t, st = s.s * s.t;
    return i / rt == j / st && (i % rt) % s.t == (j % st) % s.t;
}

/// Every mask cell in row-major order, found by scanning all p*q cells.
inline std::vector<std::pair<std::size_t, std::size_t>> brute_mask(const FactorSignature& s) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < s.p; ++i)
        for (std::size_t j = 0; j < s.q; ++j)
            if (in_mask(s, i, j)) out.emplace_back(i, j);
    return out;
}

inline Matrix dense_factor(const FactorSignature& s, const std::vector<double>& values) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(s.p), static_cast<Eigen::Index>(s.q));
    std::size_t n = 0;
    for (auto [i, j] : brute_mask(s)) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[n++];
    return m;
}

inline Matrix dense_chain(const debut::DeButChain& c) {
    Matrix p = dense_factor(c[0].signature(), c[0].values());
    for (std::size_t i = 1; i < c.size(); ++i) p = dense_factor(c[i].signature(), c[i].values()) * p;
    return p;
}

/// Random valid structure: t_i is the product of earlier r's, b_i the product
/// of later s's, which satisfies both chain recursions by construction.
inline std::vector<FactorSignature> random_structure(std::mt19937_64& rng, std::size_t max_factors = 4,
                                                     std::size_t max_rs = 3) {
    std::uniform_int_distribution<std::size_t> nf(1, max_factors), rs(1, max_rs);
    const std::size_t m = nf(rng);
    std::vector<std::size_t> r(m), s(m);
    for (std::size_t i = 0; i < m; ++i) {
        r[i] = rs(rng);
        s[i] = rs(rng);
    }
    std::vector<FactorSignature> sigs(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t t = 1, b = 1;
        for (std::size_t j = 0; j < i; ++j) t *= r[j];
        for (std::size_t j = i + 1; j < m; ++j) b *= s[j];
        sigs[i] = FactorSignature{b * r[i] * t, b * s[i] * t, r[i], s[i], t};
    }
    return sigs;
}

/// Splits n into m factors by dealing its prime factors to random slots.
inline std::vector<std::size_t> random_split(std::mt19937_64& rng, std::size_t n, std::size_t m) {
    std::vector<std::size_t> parts(m, 1);
    std::uniform_int_distribution<std::size_t> slot(0, m - 1);
    for (std::size_t f = 2; n > 1; ++f)
        while (n % f == 0) {
            parts[slot(rng)] *= f;
            n /= f;
        }
    return parts;
}

/// Random valid structure whose product is rows x cols, built from the
/// closed form t_i = prod_{j<i} r_j, b_i = prod_{j>i} s_j.
inline std::vector<FactorSignature> structure_with_shape(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                                         std::size_t max_factors = 4) {
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, max_factors)(rng);
    const auto r = random_split(rng, rows, m);
    const auto s = random_split(rng, cols, m);
    std::vector<FactorSignature> sigs(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t t = 1, b = 1;
        for (std::size_t j = 0; j < i; ++j) t *= r[j];
        for (std::size_t j = i + 1; j < m; ++j) b *= s[j];
        sigs[i] = FactorSignature{b * r[i] * t, b * s[i] * t, r[i], s[i], t};
    }
    return sigs;
}

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = d(rng);
    return m;
}

inline Tensor random_tensor(std::mt19937_64& rng, std::vector<std::size_t> dims) {
    Tensor t(std::move(dims));
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& v : t.data) v = d(rng);
    return t;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
    const double n = std::max(a.norm(), b.norm());
    return n == 0.0 ? 0.0 : (a - b).norm() / n;
}

inline double rel_diff(const Tensor& a, const Tensor& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
        den = std::max(den, std::max(a.data[i] * a.data[i], b.data[i] * b.data[i]));
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den / static_cast<double>(a.size()));
}

/// Sliding windows read straight from the input: out[h][w][o] =
/// sum_{u,v,c} K[u][v][c][o] * X[h*stride+u-pad][w*stride+v-pad][c].
inline Tensor conv_windows(const Tensor& kern, const Tensor& x, std::size_t stride, std::size_t pad) {
    const std::size_t k = kern.dims[0], ci = kern.dims[2], co = kern.dims[3];
    const std::size_t hi = x.dims[0], wi = x.dims[1];
    const std::size_t ho = (hi + 2 * pad - k) / stride + 1, wo = (wi + 2 * pad - k) / stride + 1;
    Tensor out({ho, wo, co});
    for (std::size_t h = 0; h < ho; ++h)
        for (std::size_t w = 0; w < wo; ++w)
            for (std::size_t o = 0; o < co; ++o) {
                double acc = 0.0;
                for (std::size_t u = 0; u < k; ++u)
                    for (std::size_t v = 0; v < k; ++v) {
                        const long y = static_cast<long>(h * stride + u) - static_cast<long>(pad);
                        const long z = static_cast<long>(w * stride + v) - static_cast<long>(pad);
                        if (y < 0 || z < 0 || y >= static_cast<long>(hi) || z >= static_cast<long>(wi)) continue;
                        for (std::size_t c = 0; c < ci; ++c)
                            acc += kern.at4(u, v, c, o) * x.at3(static_cast<std::size_t>(y), static_cast<std::size_t>(z), c);
                    }
                out.at3(h, w, o) = acc;
            }
    return out;
}

/// Kernel k x k x C_i x C_o from a C_o x (C_i k^2) matrix whose column index is c*k^2 + u*k + v.
inline Tensor kernel_from_matrix(const Matrix& f, std::size_t k, std::size_t ci) {
    const std::size_t co = static_cast<std::size_t>(f.rows());
    Tensor kern({k, k, ci, co});
    for (std::size_t o = 0; o < co; ++o)
        for (std::size_t c = 0; c < ci; ++c)
            for (std::size_t u = 0; u < k; ++u)
                for (std::size_t v = 0; v < k; ++v)
                    kern.at4(u, v, c, o) = f(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(c * k * k + u * k + v));
    return kern;
}

/// Least-squares values of factor j via the explicit (p_m q_1) x nnz design
/// matrix: column n holds vec(L e_u e_v^T G) for the n-th mask cell (u, v).
inline std::vector<double> design_matrix_solve(const debut::DeButChain& c, std::size_t j, const Matrix& target) {
    const auto& sig = c[j].signature();
    Matrix left = Matrix::Identity(static_cast<Eigen::Index>(c.rows()), static_cast<Eigen::Index>(c.rows()));
    for (std::size_t i = c.size(); i-- > j + 1;) left = left * dense_factor(c[i].signature(), c[i].values());
    Matrix right = Matrix::Identity(static_cast<Eigen::Index>(c.cols()), static_cast<Eigen::Index>(c.cols()));
    for (std::size_t i = 0; i < j; ++i) right = dense_factor(c[i].signature(), c[i].values()) * right;
    const auto cells = brute_mask(sig);
    Matrix design(target.size(), static_cast<Eigen::Index>(cells.size()));
    for (std::size_t n = 0; n < cells.size(); ++n) {
        const Matrix piece = left.col(static_cast<Eigen::Index>(cells[n].first)) *
                             right.row(static_cast<Eigen::Index>(cells[n].second));
        design.col(static_cast<Eigen::Index>(n)) = Eigen::Map<const Eigen::VectorXd>(piece.data(), piece.size());
    }
    const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(target.data(), target.size());
    const Eigen::VectorXd x = design.completeOrthogonalDecomposition().solve(rhs);
    return std::vector<double>(x.data(), x.data() + x.size());
}

}  // namespace oracle
