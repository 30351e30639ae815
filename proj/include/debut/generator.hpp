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

// Automated chain generation: superscripts from the four-stage shape rules,
// subscripts from a pool of admissible (r, s) diagonal-block shapes.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "debut/chain.hpp"
#include "debut/layer.hpp"

namespace debut {

enum class GenKind { Mono, Bulging };

std::string_view gen_kind_name(GenKind kind) noexcept;
GenKind parse_gen_kind(std::string_view name);

/// Positive rational num/den, kept in lowest terms.
struct Rational {
    std::uint64_t num = 3;
    std::uint64_t den = 2;

    static Rational parse(std::string_view text);
    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
};

using BlockShape = std::pair<std::size_t, std::size_t>;  // (r, s)
using Pool = std::vector<BlockShape>;

/// [(2,4),(4,8),(2,2),(4,4),(8,16)]
Pool default_pool();
/// Default pool followed by (1,2) and (1,1), which lets deep chains close
/// once the t recursion has used up the output height.
Pool extended_pool();

struct GeneratorConfig {
    std::size_t shrink_level = 3;
    GenKind kind = GenKind::Mono;
    Rational alpha{3, 2};
    Pool pool = default_pool();
    /// Reject non power-of-two channel counts instead of padding them.
    bool strict_pot = false;
};

using FactorShape = std::pair<std::size_t, std::size_t>;  // (p, q)

struct GeneratorPlan {
    LayerSpec layer;
    GenKind requested = GenKind::Mono;
    std::vector<FactorShape> sup;                 // rightmost first
    std::vector<std::array<std::size_t, 3>> sub;  // (r, s, t), rightmost first
    std::size_t c_in_padded = 0;
    std::size_t c_out_padded = 0;
    std::uint64_t nnz = 0;
    /// Against the unpadded dense count C_o * C_i * k^2.
    double eta = 0.0;
    /// Kind reported by chain validation for the emitted structure.
    ChainKind validated = ChainKind::Monotonic;
    /// Pool entries examined while assigning subscripts.
    std::size_t pool_probes = 0;

    std::vector<FactorSignature> signatures() const;
    /// Zero-valued chain with this structure.
    DeButChain structure() const;
};

/// 2^ceil(log2 c).
std::size_t round_pot(std::size_t c);

std::vector<FactorShape> plan_superscripts(const LayerSpec& layer, const GeneratorConfig& cfg);

/// Picks (r, s, t) for every factor of `sup`. The rightmost factor (two for
/// bulging chains) gets a fixed subscript derived from k, the last factor is
/// forced by the t recursion, and the rest use the first pool entry with the
/// factor's aspect ratio whose r*t divides both p and the final height.
GeneratorPlan assign_subscripts(const std::vector<FactorShape>& sup, const LayerSpec& layer,
                                const GeneratorConfig& cfg);

GeneratorPlan generate_chain(const LayerSpec& layer, const GeneratorConfig& cfg);

struct LayerOverrides {
    std::optional<std::size_t> shrink_level;
    std::optional<GenKind> kind;
    std::optional<Rational> alpha;
    std::optional<Pool> pool;
};

struct ModelLayer {
    LayerSpec layer;
    bool keep_dense = false;
    LayerOverrides overrides;
};

struct ModelSpec {
    std::vector<ModelLayer> layers;
};

struct LayerReport {
    std::string name;
    bool keep_dense = false;
    std::optional<GeneratorPlan> plan;
    std::uint64_t params = 0;
    std::uint64_t dense_params = 0;
};

struct ModelReport {
    std::vector<LayerReport> layers;
    std::uint64_t total_params = 0;
    std::uint64_t dense_params = 0;
    /// Model-wise compression 1 - total_params / dense_params.
    double mc = 0.0;
};

GeneratorConfig apply_overrides(const GeneratorConfig& base, const LayerOverrides& o);

/// Errors are rethrown with the offending layer's name in the message.
ModelReport generate_model(const ModelSpec& model, const GeneratorConfig& cfg);

}  // namespace debut
