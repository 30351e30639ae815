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

#include "debut/factor.hpp"

#include <string>
#include <vector>

namespace debut {

namespace {

std::string describe(const FactorSignature& sig) {
    return "(" + std::to_string(sig.p) + "," + std::to_string(sig.q) + "," +
           std::to_string(sig.r) + "," + std::to_string(sig.s) + "," +
           std::to_string(sig.t) + ")";
}

}  // namespace

bool FactorSignature::is_valid() const noexcept {
    if (p == 0 || q == 0 || r == 0 || s == 0 || t == 0) return false;
    if (p % (r * t) != 0 || q % (s * t) != 0) return false;
    return p / (r * t) == q / (s * t);
}

void FactorSignature::check() const {
    if (!is_valid()) {
        throw Error(ErrorCode::InvalidSignature,
                    "invalid factor signature " + describe(*this) +
                        ": need r*t | p, s*t | q and p/(r*t) == q/(s*t)");
    }
}

std::vector<std::size_t> row_columns(const FactorSignature& sig, std::size_t row) {
    std::vector<std::size_t> cols(sig.s);
    for (std::size_t k = 0; k < sig.s; ++k) cols[k] = nonzero_column(sig, row, k);
    return cols;
}

std::vector<std::pair<std::size_t, std::size_t>> nonzero_mask(const FactorSignature& sig) {
    sig.check();
    std::vector<std::pair<std::size_t, std::size_t>> mask;
    mask.reserve(sig.nnz());
    for (std::size_t i = 0; i < sig.p; ++i)
        for (std::size_t k = 0; k < sig.s; ++k) mask.emplace_back(i, nonzero_column(sig, i, k));
    return mask;
}

DeButFactor::DeButFactor(const FactorSignature& sig) : sig_(sig) {
    sig_.check();
    values_.assign(sig_.nnz(), 0.0);
}

DeButFactor::DeButFactor(const FactorSignature& sig, std::vector<double> values)
    : sig_(sig), values_(std::move(values)) {
    sig_.check();
    if (values_.size() != sig_.nnz()) {
        throw Error(ErrorCode::ValueLengthMismatch,
                    "factor " + describe(sig_) + " expects " + std::to_string(sig_.nnz()) +
                        " values, got " + std::to_string(values_.size()));
    }
}

DeButFactor DeButFactor::with_values(std::vector<double> values) const {
    return DeButFactor(sig_, std::move(values));
}

DeButFactor make_factor(const FactorSignature& sig, std::optional<std::vector<double>> values) {
    if (values) return DeButFactor(sig, std::move(*values));
    return DeButFactor(sig);
}

Matrix to_dense(const DeButFactor& f) {
    const auto& sig = f.signature();
    Matrix dense = Matrix::Zero(static_cast<Eigen::Index>(sig.p), static_cast<Eigen::Index>(sig.q));
    const auto& v = f.values();
    for (std::size_t i = 0; i < sig.p; ++i)
        for (std::size_t k = 0; k < sig.s; ++k)
            dense(static_cast<Eigen::Index>(i),
                  static_cast<Eigen::Index>(nonzero_column(sig, i, k))) = v[i * sig.s + k];
    return dense;
}

Matrix apply_factor(const DeButFactor& f, const Matrix& m, std::uint64_t* macs) {
    const auto& sig = f.signature();
    if (static_cast<std::size_t>(m.rows()) != sig.q) {
        throw Error(ErrorCode::ShapeMismatch,
                    "factor expects " + std::to_string(sig.q) + " input rows, got " +
                        std::to_string(m.rows()));
    }
    const Eigen::Index n = m.cols();
    Matrix out(static_cast<Eigen::Index>(sig.p), n);
    const double* v = f.values().data();
    const std::size_t r = sig.r, s = sig.s, t = sig.t;
    const std::size_t blocks = sig.blocks();
    if (t == 1) {
        for (Eigen::Index c = 0; c < n; ++c) {
            const double* in = m.col(c).data();
            double* o = out.col(c).data();
            for (std::size_t i = 0; i < sig.p; ++i) {
                const double* w = v + i * s;
                const double* x = in + (i / r) * s;
                double acc = 0.0;
                for (std::size_t k = 0; k < s; ++k) acc += w[k] * x[k];
                o[i] = acc;
            }
        }
    } else {
        // Weights regrouped as [row][k][tau] so the innermost loop runs over
        // the diagonal residue with unit stride in input, output and weights.
        std::vector<double> wt(sig.nnz());
        for (std::size_t blk = 0; blk < blocks; ++blk)
            for (std::size_t a = 0; a < r; ++a)
                for (std::size_t k = 0; k < s; ++k)
                    for (std::size_t tau = 0; tau < t; ++tau) {
                        const std::size_t i = blk * r * t + a * t + tau;
                        wt[((blk * r + a) * s + k) * t + tau] = v[i * s + k];
                    }
        for (Eigen::Index c = 0; c < n; ++c) {
            const double* in = m.col(c).data();
            double* o = out.col(c).data();
            for (std::size_t blk = 0; blk < blocks; ++blk) {
                const double* x = in + blk * s * t;
                for (std::size_t a = 0; a < r; ++a) {
                    double* y = o + (blk * r + a) * t;
                    const double* w = wt.data() + (blk * r + a) * s * t;
                    for (std::size_t tau = 0; tau < t; ++tau) y[tau] = w[tau] * x[tau];
                    for (std::size_t k = 1; k < s; ++k) {
                        const double* wk = w + k * t;
                        const double* xk = x + k * t;
                        for (std::size_t tau = 0; tau < t; ++tau) y[tau] += wk[tau] * xk[tau];
                    }
                }
            }
        }
    }
    if (macs) *macs += static_cast<std::uint64_t>(sig.nnz()) * static_cast<std::uint64_t>(n);
    return out;
}

void apply_factor_rows(const DeButFactor& f, const double* in, std::size_t ld_in, double* out,
                       std::size_t ld_out, std::size_t n) {
    const auto& sig = f.signature();
    const double* v = f.values().data();
    for (std::size_t i = 0; i < sig.p; ++i) {
        double* y = out + i * ld_out;
        const std::size_t base = nonzero_column(sig, i, 0);
        const double* w = v + i * sig.s;
        const double* x0 = in + base * ld_in;
        for (std::size_t j = 0; j < n; ++j) y[j] = w[0] * x0[j];
        for (std::size_t k = 1; k < sig.s; ++k) {
            const double wk = w[k];
            const double* x = in + (base + k * sig.t) * ld_in;
            for (std::size_t j = 0; j < n; ++j) y[j] += wk * x[j];
        }
    }
}

Matrix right_multiply(const Matrix& m, const DeButFactor& f) {
    const auto& sig = f.signature();
    if (static_cast<std::size_t>(m.cols()) != sig.p) {
        throw Error(ErrorCode::ShapeMismatch,
                    "right multiply expects " + std::to_string(sig.p) + " columns, got " +
                        std::to_string(m.cols()));
    }
    Matrix out = Matrix::Zero(m.rows(), static_cast<Eigen::Index>(sig.q));
    const auto& v = f.values();
    for (std::size_t i = 0; i < sig.p; ++i)
        for (std::size_t k = 0; k < sig.s; ++k)
            out.col(static_cast<Eigen::Index>(nonzero_column(sig, i, k))) +=
                v[i * sig.s + k] * m.col(static_cast<Eigen::Index>(i));
    return out;
}

}  // namespace debut
