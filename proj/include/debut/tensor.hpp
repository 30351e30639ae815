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
#include <initializer_list>
#include <numeric>
#include <vector>

#include "debut/error.hpp"
#include "debut/factor.hpp"

namespace debut {

/// Dense tensor, last dimension fastest. Feature maps are H x W x C and
/// kernels are k x k x C_i x C_o.
struct Tensor {
    std::vector<std::size_t> dims;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> d)
        : dims(std::move(d)), data(element_count(dims), 0.0) {}
    Tensor(std::vector<std::size_t> d, std::vector<double> values)
        : dims(std::move(d)), data(std::move(values)) {
        if (data.size() != element_count(dims))
            throw Error(ErrorCode::ValueLengthMismatch, "tensor data does not match its dims");
    }

    static std::size_t element_count(const std::vector<std::size_t>& d) {
        return std::accumulate(d.begin(), d.end(), std::size_t{1},
                               [](std::size_t a, std::size_t b) { return a * b; });
    }

    std::size_t rank() const noexcept { return dims.size(); }
    std::size_t size() const noexcept { return data.size(); }

    double& at3(std::size_t i, std::size_t j, std::size_t k) {
        return data[(i * dims[1] + j) * dims[2] + k];
    }
    double at3(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(i * dims[1] + j) * dims[2] + k];
    }
    double& at4(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
        return data[((i * dims[1] + j) * dims[2] + k) * dims[3] + l];
    }
    double at4(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
        return data[((i * dims[1] + j) * dims[2] + k) * dims[3] + l];
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;
};

/// Rank-2 tensor <-> matrix, row-major in the tensor.
Matrix tensor_to_matrix(const Tensor& t);
Tensor matrix_to_tensor(const Matrix& m);

}  // namespace debut
