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

#include <gtest/gtest.h>

#include <filesystem>

#include <json.hpp>

#include "debut/io.hpp"
#include "oracles.hpp"

using namespace debut;

namespace {

const std::vector<FactorSignature> kSmall{{18, 27, 2, 3, 1}, {6, 18, 1, 3, 2}, {6, 6, 3, 3, 2}};

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("debut_io_test_" + name)).string();
}

ErrorCode parse_error(const std::string& text) {
    try {
        parse_chain_spec(text).to_chain();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "parsed: " << text;
    return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ChainSpecIo, RoundTripIsBitExact) {
    const auto c = random_init(make_structure(kSmall), 77);
    const LayerSpec layer{"conv1", 3, 3, 6, 4, 4};
    const auto path = temp_path("chain.json");
    save_chain_spec(ChainSpec::from_chain(c, &layer), path);
    const auto back = load_chain_spec(path);
    ASSERT_TRUE(back.has_values());
    ASSERT_TRUE(back.layer.has_value());
    EXPECT_EQ(back.layer->name, "conv1");
    EXPECT_EQ(back.layer->h_out, 4u);
    const auto c2 = back.to_chain();
    EXPECT_EQ(c2.signatures(), c.signatures());
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(c2[i].values(), c[i].values());
    std::filesystem::remove(path);
}

TEST(ChainSpecIo, StructureOnlySpec) {
    const auto spec = parse_chain_spec(R"({"format":"debut-chain","version":1,"factors":[
        {"p":18,"q":27,"r":2,"s":3,"t":1},{"p":6,"q":18,"r":1,"s":3,"t":2},{"p":6,"q":6,"r":3,"s":3,"t":2}]})");
    EXPECT_FALSE(spec.has_values());
    EXPECT_FALSE(spec.layer.has_value());
    const auto c = spec.to_chain();
    EXPECT_EQ(c.kind(), ChainKind::Monotonic);
    const auto j = nlohmann::json::parse(chain_spec_to_json(ChainSpec::from_chain(c, nullptr, false)));
    EXPECT_FALSE(j["factors"][0].contains("values"));
}

TEST(ChainSpecIo, Errors) {
    EXPECT_EQ(parse_error("{"), ErrorCode::ParseError);
    EXPECT_EQ(parse_error(R"({"factors":[]})"), ErrorCode::ParseError);
    EXPECT_EQ(parse_error(R"({"version":2,"factors":[{"p":1,"q":1,"r":1,"s":1,"t":1}]})"), ErrorCode::ParseError);
    EXPECT_EQ(parse_error(R"({"factors":[{"p":2,"q":2,"r":2,"s":2,"t":1,"values":[1,2,3]}]})"),
              ErrorCode::ValueLengthMismatch);
    EXPECT_EQ(parse_error(R"({"factors":[{"p":18,"q":27,"r":2,"s":3,"t":1},{"p":6,"q":18,"r":1,"s":3,"t":1}]})"),
              ErrorCode::TRecursionBreak);
    EXPECT_EQ(parse_error(R"({"factors":[{"p":6,"q":18,"r":2,"s":3,"t":1}]})"), ErrorCode::InvalidSignature);
    EXPECT_EQ(parse_error(R"({"factors":[{"p":"x","q":18,"r":2,"s":3,"t":1}]})"), ErrorCode::ParseError);
    EXPECT_THROW(load_chain_spec("/nonexistent/dir/chain.json"), Error);
}

TEST(TensorIo, RoundTripF64AndF32) {
    std::mt19937_64 rng(1);
    const Tensor t = oracle::random_tensor(rng, {3, 4, 5});
    const auto bytes = encode_tensor(t);
    ASSERT_EQ(bytes.size(), 4u + 2 + 2 + 2 + 3 * 8 + 60 * 8);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "DBTT");
    EXPECT_EQ(bytes[4], 1);
    EXPECT_EQ(bytes[6], 1);
    EXPECT_EQ(bytes[8], 3);
    EXPECT_EQ(bytes[10], 3);
    DType dt = DType::F32;
    EXPECT_EQ(decode_tensor(bytes, &dt), t);
    EXPECT_EQ(dt, DType::F64);

    const auto b32 = encode_tensor(t, DType::F32);
    ASSERT_EQ(b32.size(), 10u + 24 + 60 * 4);
    const Tensor t32 = decode_tensor(b32, &dt);
    EXPECT_EQ(dt, DType::F32);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t32.data[i], static_cast<double>(static_cast<float>(t.data[i])));
    EXPECT_EQ(decode_tensor(encode_tensor(t32, DType::F32)), t32);

    const auto path = temp_path("t.dbt");
    save_tensor(t, path);
    EXPECT_EQ(load_tensor(path), t);
    std::filesystem::remove(path);
}

TEST(TensorIo, RejectsCorruptInput) {
    const Tensor t({2, 2}, {1, 2, 3, 4});
    auto bytes = encode_tensor(t);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW(decode_tensor(bad_magic), Error);
    auto truncated = bytes;
    truncated.pop_back();
    EXPECT_THROW(decode_tensor(truncated), Error);
    auto bad_dtype = bytes;
    bad_dtype[6] = 7;
    EXPECT_THROW(decode_tensor(bad_dtype), Error);
    EXPECT_THROW(decode_tensor({'D', 'B'}), Error);
}

TEST(TensorIo, MatrixConversion) {
    Matrix m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    const Tensor t = matrix_to_tensor(m);
    EXPECT_EQ(t.dims, (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(t.data, (std::vector<double>{1, 2, 3, 4, 5, 6}));
    EXPECT_EQ(tensor_to_matrix(t), m);
    EXPECT_THROW(tensor_to_matrix(Tensor({2, 2, 2})), Error);
}

TEST(ModelIo, ParseModelSpecAndPool) {
    const auto model = parse_model_spec(R"({"layers":[
        {"name":"a","k":3,"Ci":3,"Co":64,"Ho":32,"Wo":32,"keep_dense":true},
        {"name":"b","k":3,"Ci":64,"Co":64,"overrides":{"N":5,"kind":"bulging","alpha":"3/2","pool":[[2,4],[1,1]]}}]})");
    ASSERT_EQ(model.layers.size(), 2u);
    EXPECT_TRUE(model.layers[0].keep_dense);
    EXPECT_EQ(model.layers[0].layer.h_out, 32u);
    EXPECT_EQ(*model.layers[1].overrides.shrink_level, 5u);
    EXPECT_EQ(*model.layers[1].overrides.kind, GenKind::Bulging);
    EXPECT_EQ(model.layers[1].overrides.alpha->str(), "3/2");
    EXPECT_EQ(model.layers[1].overrides.pool->size(), 2u);
    EXPECT_EQ(parse_model_spec(R"([{"name":"x","k":1,"Ci":8,"Co":8}])").layers.size(), 1u);
    EXPECT_EQ(parse_model_spec(R"([{"k":1,"Ci":8,"Co":8,"overrides":{"alpha":1.5}}])").layers[0].overrides.alpha->str(), "3/2");
    EXPECT_THROW(parse_model_spec("[]"), Error);
    EXPECT_THROW(parse_model_spec(R"([{"k":3,"Ci":0,"Co":8}])"), Error);
    EXPECT_EQ(parse_pool("[[2,4],[4,8]]"), (Pool{{2, 4}, {4, 8}}));
    EXPECT_THROW(parse_pool("[[2,0]]"), Error);
    EXPECT_THROW(parse_pool("[[2]]"), Error);
}

TEST(ModelIo, PlanJson) {
    const auto plan = generate_chain({"c", 3, 64, 64, 0, 0}, GeneratorConfig{5});
    const auto j = nlohmann::json::parse(plan_to_json(plan));
    EXPECT_EQ(j["format"], "debut-chain");
    EXPECT_EQ(j["generator"]["nnz"], 6400);
    EXPECT_EQ(j["generator"]["S_sup"][0], nlohmann::json({512, 576}));
    EXPECT_EQ(j["generator"]["S_sub"][3], nlohmann::json({2, 4, 32}));
    const auto spec = parse_chain_spec(j.dump());
    EXPECT_EQ(spec.to_chain().signatures(), plan.signatures());
}
