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
#include <string>

namespace debut {

/// Geometry of a convolution layer with a k x k x C_i x C_o kernel.
/// Output spatial size is optional and only used for MAC accounting.
struct LayerSpec {
    std::string name;
    std::size_t k = 1;
    std::size_t c_in = 1;
    std::size_t c_out = 1;
    std::size_t h_out = 0;
    std::size_t w_out = 0;

    std::uint64_t dense_params() const noexcept {
        return static_cast<std::uint64_t>(c_out) * c_in * k * k;
    }
    std::size_t dense_cols() const noexcept { return c_in * k * k; }
};

}  // namespace debut
