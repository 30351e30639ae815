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

// File formats:
//   chain spec  JSON {"format":"debut-chain","version":1,"layer":{...},
//               "factors":[{"p","q","r","s","t","values"?}, ...]}, rightmost first
//   tensor      "DBTT" | u16 version | u16 dtype (0=f32, 1=f64) | u16 rank |
//               u64 dims[rank] | payload, all little-endian, last dim fastest
//   model spec  JSON list (or {"layers":[...]}) of
//               {name, k, Ci, Co, Ho?, Wo?, keep_dense?, overrides?}
//   pool        JSON [[r, s], ...]

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "debut/chain.hpp"
#include "debut/generator.hpp"
#include "debut/tensor.hpp"

namespace debut {

struct ChainSpec {
    std::vector<FactorSignature> sigs;
    std::vector<std::optional<std::vector<double>>> values;
    std::optional<LayerSpec> layer;

    bool has_values() const;
    /// Validated chain; factors without values are zero-filled.
    DeButChain to_chain() const;
    static ChainSpec from_chain(const DeButChain& c, const LayerSpec* layer = nullptr,
                                bool include_values = true);
};

ChainSpec parse_chain_spec(const std::string& json_text);
std::string chain_spec_to_json(const ChainSpec& spec, int indent = 2);
ChainSpec load_chain_spec(const std::string& path);
void save_chain_spec(const ChainSpec& spec, const std::string& path);

enum class DType : std::uint16_t { F32 = 0, F64 = 1 };

std::vector<std::uint8_t> encode_tensor(const Tensor& t, DType dtype = DType::F64);
/// Sets `dtype` (when non-null) to the stored element type.
Tensor decode_tensor(const std::vector<std::uint8_t>& bytes, DType* dtype = nullptr);
Tensor load_tensor(const std::string& path, DType* dtype = nullptr);
void save_tensor(const Tensor& t, const std::string& path, DType dtype = DType::F64);

ModelSpec parse_model_spec(const std::string& json_text);
Pool parse_pool(const std::string& json_text);

std::string plan_to_json(const GeneratorPlan& plan, int indent = 2);
std::string model_report_to_json(const ModelReport& report, int indent = 2);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace debut
