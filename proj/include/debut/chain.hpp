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
#include <string_view>
#include <vector>

#include "debut/factor.hpp"
#include "debut/layer.hpp"

namespace debut {

enum class ChainKind { Monotonic, Bulging };

std::string_view chain_kind_name(ChainKind kind) noexcept;

struct ChainValidation {
    ChainKind kind = ChainKind::Monotonic;
    /// Bulging chain whose overall shape expands (p_m > q_1) with an
    /// intermediate dip. Accepted, but callers may want to surface it.
    bool expanding_bulge = false;
};

/// Checks shape compatibility and the t recursion, then classifies the chain.
/// `factors` is ordered rightmost first (factors[0] is applied first).
ChainValidation validate_chain(const std::vector<DeButFactor>& factors);
ChainValidation validate_signatures(const std::vector<FactorSignature>& sigs);

/// A validated sequence of factors. Factor 0 is the rightmost one.
class DeButChain {
public:
    explicit DeButChain(std::vector<DeButFactor> factors);

    const std::vector<DeButFactor>& factors() const noexcept { return factors_; }
    std::size_t size() const noexcept { return factors_.size(); }
    const DeButFactor& operator[](std::size_t i) const { return factors_[i]; }
    ChainKind kind() const noexcept { return validation_.kind; }
    bool expanding_bulge() const noexcept { return validation_.expanding_bulge; }

    std::size_t rows() const noexcept { return factors_.back().rows(); }
    std::size_t cols() const noexcept { return factors_.front().cols(); }

    std::vector<FactorSignature> signatures() const;
    /// Same structure, new values for every factor.
    DeButChain with_values(const std::vector<std::vector<double>>& values) const;

private:
    std::vector<DeButFactor> factors_;
    ChainValidation validation_;
};

/// Zero-valued chain for a structure.
DeButChain make_structure(const std::vector<FactorSignature>& sigs);

struct ChainStats {
    std::uint64_t nnz_total = 0;
    std::uint64_t macs_per_column = 0;
    std::uint64_t macs_bound = 0;
    std::uint64_t dense_params = 0;
    /// 1 - nnz_total / dense_params; negative when the chain expands.
    double compression_ratio = 0.0;
};

/// Dense reference is C_o * C_i * k^2 when a layer is given, p_m * q_1 otherwise.
ChainStats chain_stats(const DeButChain& c, const LayerSpec* layer = nullptr);

/// Factor-by-factor product f_m (... (f_1 m)). With threads > 1 the columns are
/// split into contiguous ranges; each column is computed the same way.
Matrix apply_chain(const DeButChain& c, const Matrix& m, std::uint64_t* macs = nullptr,
                   unsigned threads = 1);

/// Same product on row-layout buffers: `in` is q_1 x n, `out` is p_m x n,
/// both row-major and contiguous. Threads split the n columns.
void apply_chain_rows(const DeButChain& c, const double* in, double* out, std::size_t n,
                      std::uint64_t* macs = nullptr, unsigned threads = 1);

Matrix expand_chain(const DeButChain& c);

enum class InitScheme { Zeros, Ones, UniformFanin, NormalFanin };

InitScheme parse_init_scheme(std::string_view name);
std::string_view init_scheme_name(InitScheme scheme) noexcept;

/// Draws every value i.i.d. Fan-in schemes use variance 1/s per factor.
DeButChain random_init(const DeButChain& c, std::uint64_t seed,
                       InitScheme scheme = InitScheme::UniformFanin);
DeButChain random_init(const DeButChain& c, std::uint64_t seed, std::string_view scheme);

}  // namespace debut
