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
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "debut/error.hpp"

namespace debut {

using Matrix = Eigen::MatrixXd;

/// Shape of a DeBut factor R^{(p,q)}_{(r,s,t)}: a p x q matrix made of
/// b = p/(r t) = q/(s t) diagonal blocks, each an r x s grid of t x t
/// diagonal matrices.
struct FactorSignature {
    std::size_t p = 1;
    std::size_t q = 1;
    std::size_t r = 1;
    std::size_t s = 1;
    std::size_t t = 1;

    bool is_valid() const noexcept;
    /// Throws InvalidSignature when the divisibility or block-count rules fail.
    void check() const;

    std::size_t blocks() const noexcept { return p / (r * t); }
    std::size_t nnz() const noexcept { return p * s; }

    friend bool operator==(const FactorSignature&, const FactorSignature&) = default;
};

/// Column indices of row `row`'s nonzeros, ascending. Always `sig.s` entries.
std::vector<std::size_t> row_columns(const FactorSignature& sig, std::size_t row);

/// Every (row, col) nonzero position in canonical (row-major) order.
std::vector<std::pair<std::size_t, std::size_t>> nonzero_mask(const FactorSignature& sig);

/// Column of the `slot`-th nonzero in row `row` (slot < s).
inline std::size_t nonzero_column(const FactorSignature& sig, std::size_t row,
                                  std::size_t slot) noexcept {
    const std::size_t rt = sig.r * sig.t;
    const std::size_t block = row / rt;
    const std::size_t residue = (row % rt) % sig.t;
    return block * sig.s * sig.t + slot * sig.t + residue;
}

class DeButFactor {
public:
    DeButFactor() = default;
    /// Zero-filled factor.
    explicit DeButFactor(const FactorSignature& sig);
    DeButFactor(const FactorSignature& sig, std::vector<double> values);

    const FactorSignature& signature() const noexcept { return sig_; }
    std::size_t rows() const noexcept { return sig_.p; }
    std::size_t cols() const noexcept { return sig_.q; }
    /// Nonzero values in canonical order: value (row i, slot k) at i*s + k.
    const std::vector<double>& values() const noexcept { return values_; }

    DeButFactor with_values(std::vector<double> values) const;

    /// Multiply-add count for one input column.
    std::uint64_t macs_per_column() const noexcept { return sig_.nnz(); }

private:
    FactorSignature sig_;
    std::vector<double> values_;
};

DeButFactor make_factor(const FactorSignature& sig,
                        std::optional<std::vector<double>> values = std::nullopt);

Matrix to_dense(const DeButFactor& f);

/// f * m, touching only the p*s nonzeros per column. When `macs` is non-null
/// the number of multiply-adds performed is added to it.
Matrix apply_factor(const DeButFactor& f, const Matrix& m, std::uint64_t* macs = nullptr);

/// m * f, used to accumulate left products of a chain.
Matrix right_multiply(const Matrix& m, const DeButFactor& f);

/// Row-layout product: `in` holds q rows of n values (row stride ld_in),
/// `out` receives p rows of n values (row stride ld_out).
void apply_factor_rows(const DeButFactor& f, const double* in, std::size_t ld_in, double* out,
                       std::size_t ld_out, std::size_t n);

}  // namespace debut
