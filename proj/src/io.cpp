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

#include "debut/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

namespace debut {

using json = nlohmann::json;

namespace {

constexpr int kChainVersion = 1;
constexpr std::uint16_t kTensorVersion = 1;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

json layer_to_json(const LayerSpec& l) {
    json j = {{"name", l.name}, {"k", l.k}, {"Ci", l.c_in}, {"Co", l.c_out}};
    if (l.h_out) j["Ho"] = l.h_out;
    if (l.w_out) j["Wo"] = l.w_out;
    return j;
}

LayerSpec layer_from_json(const json& j) {
    if (!j.is_object()) parse_fail("layer must be an object");
    LayerSpec l;
    l.name = j.value("name", std::string{});
    l.k = j.at("k").get<std::size_t>();
    l.c_in = j.at("Ci").get<std::size_t>();
    l.c_out = j.at("Co").get<std::size_t>();
    l.h_out = j.value("Ho", std::size_t{0});
    l.w_out = j.value("Wo", std::size_t{0});
    if (l.k == 0 || l.c_in == 0 || l.c_out == 0) parse_fail("layer '" + l.name + "' has a zero dimension");
    return l;
}

json chain_spec_json(const ChainSpec& spec) {
    json j = {{"format", "debut-chain"}, {"version", kChainVersion}};
    if (spec.layer) j["layer"] = layer_to_json(*spec.layer);
    json factors = json::array();
    for (std::size_t i = 0; i < spec.sigs.size(); ++i) {
        const auto& s = spec.sigs[i];
        json f = {{"p", s.p}, {"q", s.q}, {"r", s.r}, {"s", s.s}, {"t", s.t}};
        if (i < spec.values.size() && spec.values[i]) f["values"] = *spec.values[i];
        factors.push_back(std::move(f));
    }
    j["factors"] = std::move(factors);
    return j;
}

json plan_json(const GeneratorPlan& plan) {
    ChainSpec spec;
    spec.sigs = plan.signatures();
    spec.values.assign(spec.sigs.size(), std::nullopt);
    spec.layer = plan.layer;
    json j = chain_spec_json(spec);
    json sup = json::array(), sub = json::array();
    for (const auto& [p, q] : plan.sup) sup.push_back({p, q});
    for (const auto& rst : plan.sub) sub.push_back({rst[0], rst[1], rst[2]});
    j["generator"] = {{"requested_kind", gen_kind_name(plan.requested)},
                      {"validated_kind", chain_kind_name(plan.validated)},
                      {"S_sup", std::move(sup)},
                      {"S_sub", std::move(sub)},
                      {"Ci_padded", plan.c_in_padded},
                      {"Co_padded", plan.c_out_padded},
                      {"nnz", plan.nnz},
                      {"eta", plan.eta}};
    return j;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

struct Reader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (bytes.size() - pos < n) parse_fail("tensor file truncated");
    }
    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>(bytes[pos] | (bytes[pos + 1] << 8));
        pos += 2;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[pos + static_cast<std::size_t>(i)]) << (8 * i);
        pos += 8;
        return v;
    }
};

}  // namespace

bool ChainSpec::has_values() const {
    if (values.size() != sigs.size()) return false;
    for (const auto& v : values)
        if (!v) return false;
    return true;
}

DeButChain ChainSpec::to_chain() const {
    validate_signatures(sigs);
    std::vector<DeButFactor> factors;
    factors.reserve(sigs.size());
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        try {
            if (i < values.size() && values[i]) {
                factors.emplace_back(sigs[i], *values[i]);
            } else {
                factors.emplace_back(sigs[i]);
            }
        } catch (const Error& e) {
            throw Error(e.code(), "factor " + std::to_string(i + 1) + ": " + e.what(), i + 1);
        }
    }
    return DeButChain(std::move(factors));
}

ChainSpec ChainSpec::from_chain(const DeButChain& c, const LayerSpec* layer, bool include_values) {
    ChainSpec spec;
    spec.sigs = c.signatures();
    for (const auto& f : c.factors()) {
        if (include_values) {
            spec.values.emplace_back(f.values());
        } else {
            spec.values.emplace_back(std::nullopt);
        }
    }
    if (layer) spec.layer = *layer;
    return spec;
}

ChainSpec parse_chain_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        parse_fail(std::string("chain spec is not valid JSON: ") + e.what());
    }
    ChainSpec spec;
    try {
        if (j.contains("version") && j.at("version").get<int>() != kChainVersion) {
            parse_fail("unsupported chain spec version " + j.at("version").dump());
        }
        if (j.contains("layer")) spec.layer = layer_from_json(j.at("layer"));
        const auto& factors = j.at("factors");
        if (!factors.is_array() || factors.empty()) parse_fail("'factors' must be a non-empty array");
        for (const auto& f : factors) {
            FactorSignature sig{f.at("p").get<std::size_t>(), f.at("q").get<std::size_t>(),
                                f.at("r").get<std::size_t>(), f.at("s").get<std::size_t>(),
                                f.at("t").get<std::size_t>()};
            spec.sigs.push_back(sig);
            if (f.contains("values") && !f.at("values").is_null()) {
                spec.values.emplace_back(f.at("values").get<std::vector<double>>());
            } else {
                spec.values.emplace_back(std::nullopt);
            }
        }
    } catch (const json::exception& e) {
        parse_fail(std::string("malformed chain spec: ") + e.what());
    }
    for (std::size_t i = 0; i < spec.sigs.size(); ++i) {
        if (spec.values[i] && spec.values[i]->size() != spec.sigs[i].nnz()) {
            throw Error(ErrorCode::ValueLengthMismatch,
                        "factor " + std::to_string(i + 1) + " lists " +
                            std::to_string(spec.values[i]->size()) + " values, expected " +
                            std::to_string(spec.sigs[i].nnz()),
                        i + 1);
        }
    }
    return spec;
}

std::string chain_spec_to_json(const ChainSpec& spec, int indent) {
    return chain_spec_json(spec).dump(indent);
}

ChainSpec load_chain_spec(const std::string& path) { return parse_chain_spec(read_text_file(path)); }

void save_chain_spec(const ChainSpec& spec, const std::string& path) {
    write_text_file(path, chain_spec_to_json(spec) + "\n");
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t, DType dtype) {
    if (t.data.size() != Tensor::element_count(t.dims)) {
        throw Error(ErrorCode::ValueLengthMismatch, "tensor data does not match its dims");
    }
    std::vector<std::uint8_t> out = {'D', 'B', 'T', 'T'};
    put_u16(out, kTensorVersion);
    put_u16(out, static_cast<std::uint16_t>(dtype));
    put_u16(out, static_cast<std::uint16_t>(t.rank()));
    for (auto d : t.dims) put_u64(out, d);
    const std::size_t elem = dtype == DType::F32 ? 4 : 8;
    out.reserve(out.size() + elem * t.size());
    for (double v : t.data) {
        if (dtype == DType::F32) {
            const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
            for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
        } else {
            put_u64(out, std::bit_cast<std::uint64_t>(v));
        }
    }
    return out;
}

Tensor decode_tensor(const std::vector<std::uint8_t>& bytes, DType* dtype) {
    Reader in{bytes};
    in.need(4);
    if (std::memcmp(bytes.data(), "DBTT", 4) != 0) parse_fail("bad tensor magic");
    in.pos = 4;
    if (const auto version = in.u16(); version != kTensorVersion) {
        parse_fail("unsupported tensor version " + std::to_string(version));
    }
    const auto code = in.u16();
    if (code > 1) parse_fail("unknown tensor dtype code " + std::to_string(code));
    const auto dt = static_cast<DType>(code);
    const auto rank = in.u16();
    std::vector<std::size_t> dims(rank);
    for (auto& d : dims) d = static_cast<std::size_t>(in.u64());
    const std::size_t count = Tensor::element_count(dims);
    const std::size_t elem = dt == DType::F32 ? 4 : 8;
    if (bytes.size() - in.pos != count * elem) parse_fail("tensor payload length does not match dims");
    std::vector<double> data(count);
    for (auto& v : data) {
        if (dt == DType::F32) {
            std::uint32_t bits = 0;
            for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(bytes[in.pos + static_cast<std::size_t>(i)]) << (8 * i);
            in.pos += 4;
            v = static_cast<double>(std::bit_cast<float>(bits));
        } else {
            v = std::bit_cast<double>(in.u64());
        }
    }
    if (dtype) *dtype = dt;
    return Tensor(std::move(dims), std::move(data));
}

Tensor load_tensor(const std::string& path, DType* dtype) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return decode_tensor(bytes, dtype);
}

void save_tensor(const Tensor& t, const std::string& path, DType dtype) {
    const auto bytes = encode_tensor(t, dtype);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

static Pool parse_pool_json(const json& j) {
    if (!j.is_array() || j.empty()) parse_fail("pool must be a non-empty array of [r, s] pairs");
    Pool pool;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) parse_fail("pool entries are [r, s] pairs");
        const auto r = e[0].get<std::size_t>(), s = e[1].get<std::size_t>();
        if (r == 0 || s == 0) parse_fail("pool entries must be positive");
        pool.emplace_back(r, s);
    }
    return pool;
}

Pool parse_pool(const std::string& json_text) {
    try {
        return parse_pool_json(json::parse(json_text));
    } catch (const json::exception& e) {
        parse_fail(std::string("malformed pool: ") + e.what());
    }
}

ModelSpec parse_model_spec(const std::string& json_text) {
    ModelSpec model;
    try {
        const json root = json::parse(json_text);
        const json& layers = root.is_object() ? root.at("layers") : root;
        if (!layers.is_array() || layers.empty()) parse_fail("model spec needs a non-empty layer list");
        for (const auto& l : layers) {
            ModelLayer ml;
            ml.layer = layer_from_json(l);
            ml.keep_dense = l.value("keep_dense", false);
            if (l.contains("overrides")) {
                const auto& o = l.at("overrides");
                if (o.contains("N")) ml.overrides.shrink_level = o.at("N").get<std::size_t>();
                if (o.contains("kind")) ml.overrides.kind = parse_gen_kind(o.at("kind").get<std::string>());
                if (o.contains("alpha")) {
                    const auto& a = o.at("alpha");
                    ml.overrides.alpha = Rational::parse(a.is_string() ? a.get<std::string>() : a.dump());
                }
                if (o.contains("pool")) ml.overrides.pool = parse_pool_json(o.at("pool"));
            }
            model.layers.push_back(std::move(ml));
        }
    } catch (const json::exception& e) {
        parse_fail(std::string("malformed model spec: ") + e.what());
    }
    return model;
}

std::string plan_to_json(const GeneratorPlan& plan, int indent) { return plan_json(plan).dump(indent); }

std::string model_report_to_json(const ModelReport& report, int indent) {
    json layers = json::array();
    for (const auto& l : report.layers) {
        json j = {{"name", l.name},
                  {"keep_dense", l.keep_dense},
                  {"params", l.params},
                  {"dense_params", l.dense_params}};
        if (l.plan) j["chain"] = plan_json(*l.plan);
        layers.push_back(std::move(j));
    }
    json root = {{"format", "debut-model-plan"},
                 {"version", 1},
                 {"total_params", report.total_params},
                 {"dense_params", report.dense_params},
                 {"mc", report.mc},
                 {"layers", std::move(layers)}};
    return root.dump(indent);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    f << text;
    if (!f) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace debut
