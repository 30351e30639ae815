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
#include <stdexcept>
#include <string>
#include <string_view>

namespace debut {

enum class ErrorCode {
    InvalidArgument,
    InvalidSignature,
    ValueLengthMismatch,
    ShapeMismatch,
    ShapeChainBreak,
    TRecursionBreak,
    UnknownScheme,
    UnsupportedRatio,
    InfeasibleStage3,
    NonIntegerBulge,
    PoolExhausted,
    FinalFactorInfeasible,
    NonIntegralOutput,
    SingularSystem,
    MissingValues,
    ParseError,
    IoError,
};

std::string_view error_code_name(ErrorCode code) noexcept;

/// Library-wide exception. `factor_index` is 1-based when the failure can be
/// attributed to a single factor of a chain, 0 otherwise.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::size_t factor_index = 0)
        : std::runtime_error(what), code_(code), factor_index_(factor_index) {}

    ErrorCode code() const noexcept { return code_; }
    std::size_t factor_index() const noexcept { return factor_index_; }

private:
    ErrorCode code_;
    std::size_t factor_index_;
};

}  // namespace debut
