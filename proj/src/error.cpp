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

#include "debut/error.hpp"

namespace debut {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidSignature: return "InvalidSignature";
        case ErrorCode::ValueLengthMismatch: return "ValueLengthMismatch";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::ShapeChainBreak: return "ShapeChainBreak";
        case ErrorCode::TRecursionBreak: return "TRecursionBreak";
        case ErrorCode::UnknownScheme: return "UnknownScheme";
        case ErrorCode::UnsupportedRatio: return "UnsupportedRatio";
        case ErrorCode::InfeasibleStage3: return "InfeasibleStage3";
        case ErrorCode::NonIntegerBulge: return "NonIntegerBulge";
        case ErrorCode::PoolExhausted: return "PoolExhausted";
        case ErrorCode::FinalFactorInfeasible: return "FinalFactorInfeasible";
        case ErrorCode::NonIntegralOutput: return "NonIntegralOutput";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::MissingValues: return "MissingValues";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace debut
