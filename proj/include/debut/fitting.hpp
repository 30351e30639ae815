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
#include <vector>

#include "debut/chain.hpp"

namespace debut {

struct FitOptions {
    std::size_t max_sweeps = 50;
    /// Stop once a sweep lowers the error by less than rel_tol * error.
    double rel_tol = 1e-8;
    /// Tikhonov damping, relative to the mean diagonal of each normal system.
    double ridge = 0.0;
    std::uint64_t seed = 0;
};

struct FitStep {
    std::size_t sweep;   // 1-based
    std::size_t factor;  // 1-based, rightmost = 1
    double error;
};

struct FitReport {
    double initial_error = 0.0;
    /// Relative error after every single-factor update.
    std::vector<FitStep> error_trace;
    /// Relative error at the end of each sweep.
    std::vector<double> sweep_errors;
    double final_error = 0.0;
    std::size_t sweeps_used = 0;
};

struct FitResult {
    DeButChain chain;
    FitReport report;
};

/// ||target - expand_chain(c)||_F / ||target||_F, with 0/0 = 0.
double fit_error(const DeButChain& c, const Matrix& target);

/// Alternating least squares over the chain's nonzeros, starting from a
/// uniform-fanin draw. Each sweep updates factors rightmost to leftmost and
/// back; every update is the exact (ridge-damped) least-squares solution for
/// that factor with the others held fixed.
FitResult als_fit(const DeButChain& structure, const Matrix& target, const FitOptions& opts = {});

/// Exact least-squares update of factor `j` (0-based) given the others.
DeButFactor solve_factor(const DeButChain& c, std::size_t j, const Matrix& target, double ridge);

}  // namespace debut
