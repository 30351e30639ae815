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

// Random (layer, chain, input) cases shared by the convolution tests and the
// acceptance run.

#include <optional>
#include <random>
#include <vector>

#include "debut/convolution.hpp"
#include "debut/generator.hpp"
#include "oracles.hpp"

namespace cases {

struct LayerCase {
    debut::DeButChain chain;
    debut::LayerSpec layer;
    debut::ConvParams cp;
    debut::Tensor x;
    bool generated = false;
};

/// k in {1, 3}, channels in [1, 16], spatial size in [3, 8]. Every other case
/// tries the generator first; the rest (and generator failures) use a random
/// structure whose product is exactly C_o x C_i k^2.
inline LayerCase random_layer_case(std::mt19937_64& rng, std::uint64_t seed) {
    using namespace debut;
    std::uniform_int_distribution<int> coin(0, 1), ch(1, 16), sp(3, 8), n_d(3, 9);
    const std::size_t k = coin(rng) ? 3 : 1;
    const std::size_t ci = static_cast<std::size_t>(ch(rng));
    std::size_t co = static_cast<std::size_t>(ch(rng));
    LayerSpec layer{"rand", k, ci, co, 0, 0};
    std::optional<DeButChain> chain;
    if (coin(rng)) {
        const std::size_t pci = round_pot(ci);
        std::vector<std::size_t> outs;
        for (std::size_t c = 1; c <= 16; ++c) {
            const std::size_t pco = round_pot(c);
            if (pco == pci || pco * 2 == pci || pco == pci * 2) outs.push_back(c);
        }
        co = outs[std::uniform_int_distribution<std::size_t>(0, outs.size() - 1)(rng)];
        GeneratorConfig cfg;
        cfg.shrink_level = static_cast<std::size_t>(n_d(rng));
        cfg.pool = extended_pool();
        layer.c_out = co;
        try {
            chain = random_init(generate_chain(layer, cfg).structure(), seed);
        } catch (const Error&) {
        }
    }
    const bool generated = chain.has_value();
    if (!generated) chain = random_init(make_structure(oracle::structure_with_shape(rng, co, ci * k * k)), seed);
    std::uniform_int_distribution<std::size_t> st(1, 2), pad(0, k / 2);
    const ConvParams cp{st(rng), pad(rng)};
    std::size_t h = static_cast<std::size_t>(sp(rng)), w = static_cast<std::size_t>(sp(rng));
    while ((h + 2 * cp.padding - k) % cp.stride != 0) ++h;
    while ((w + 2 * cp.padding - k) % cp.stride != 0) ++w;
    return {std::move(*chain), layer, cp, oracle::random_tensor(rng, {h, w, ci}), generated};
}

/// Window-oracle output for a case: the chain product's top-left C_o x C_i k^2
/// block read as a kernel.
inline debut::Tensor oracle_output(const LayerCase& cs) {
    const debut::Matrix dense = oracle::dense_chain(cs.chain);
    const std::size_t kk = cs.layer.k * cs.layer.k;
    const debut::Matrix f = dense.topLeftCorner(static_cast<Eigen::Index>(cs.layer.c_out),
                                         static_cast<Eigen::Index>(cs.layer.c_in * kk));
    return oracle::conv_windows(oracle::kernel_from_matrix(f, cs.layer.k, cs.layer.c_in), cs.x, cs.cp.stride,
                                cs.cp.padding);
}

}  // namespace cases
