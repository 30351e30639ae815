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

#include "debut/debut.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <random>
#include <string>

#include <json.hpp>

#include "debut/chain.hpp"
#include "debut/convolution.hpp"
#include "debut/fitting.hpp"
#include "debut/generator.hpp"
#include "debut/io.hpp"

using namespace debut;
using Idx = Eigen::Index;

struct debut_chain {
    DeButChain chain;
    std::optional<LayerSpec> layer;
    bool has_values = false;
};

struct debut_tensor {
    Tensor tensor;
};

struct debut_model_report {
    ModelReport report;
    std::vector<std::optional<debut_chain>> chains;
};

struct debut_fit_report {
    FitReport report;
};

namespace {

thread_local std::string g_last_error;
thread_local std::size_t g_last_factor = 0;

debut_status to_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return DEBUT_ERR_INVALID_ARGUMENT;
        case ErrorCode::InvalidSignature: return DEBUT_ERR_INVALID_SIGNATURE;
        case ErrorCode::ValueLengthMismatch: return DEBUT_ERR_VALUE_LENGTH_MISMATCH;
        case ErrorCode::ShapeMismatch: return DEBUT_ERR_SHAPE_MISMATCH;
        case ErrorCode::ShapeChainBreak: return DEBUT_ERR_SHAPE_CHAIN_BREAK;
        case ErrorCode::TRecursionBreak: return DEBUT_ERR_T_RECURSION_BREAK;
        case ErrorCode::UnknownScheme: return DEBUT_ERR_UNKNOWN_SCHEME;
        case ErrorCode::UnsupportedRatio: return DEBUT_ERR_UNSUPPORTED_RATIO;
        case ErrorCode::InfeasibleStage3: return DEBUT_ERR_INFEASIBLE_STAGE3;
        case ErrorCode::NonIntegerBulge: return DEBUT_ERR_NON_INTEGER_BULGE;
        case ErrorCode::PoolExhausted: return DEBUT_ERR_POOL_EXHAUSTED;
        case ErrorCode::FinalFactorInfeasible: return DEBUT_ERR_FINAL_FACTOR_INFEASIBLE;
        case ErrorCode::NonIntegralOutput: return DEBUT_ERR_NON_INTEGRAL_OUTPUT;
        case ErrorCode::SingularSystem: return DEBUT_ERR_SINGULAR_SYSTEM;
        case ErrorCode::MissingValues: return DEBUT_ERR_MISSING_VALUES;
        case ErrorCode::ParseError: return DEBUT_ERR_PARSE;
        case ErrorCode::IoError: return DEBUT_ERR_IO;
    }
    return DEBUT_ERR_INTERNAL;
}

debut_status fail(debut_status status, std::string message, std::size_t factor = 0) {
    g_last_error = std::move(message);
    g_last_factor = factor;
    return status;
}

template <typename F>
debut_status guarded(F&& body) {
    try {
        g_last_error.clear();
        g_last_factor = 0;
        body();
        return DEBUT_OK;
    } catch (const Error& e) {
        return fail(to_status(e.code()), e.what(), e.factor_index());
    } catch (const std::bad_alloc&) {
        return fail(DEBUT_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(DEBUT_ERR_INTERNAL, e.what());
    }
}

void require(bool cond, const char* what) {
    if (!cond) throw Error(ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

FactorSignature from_c(const debut_signature& s) { return {s.p, s.q, s.r, s.s, s.t}; }

LayerSpec from_c(const debut_layer& l) {
    LayerSpec spec;
    spec.name = l.name ? l.name : "";
    spec.k = l.k;
    spec.c_in = l.c_in;
    spec.c_out = l.c_out;
    spec.h_out = l.h_out;
    spec.w_out = l.w_out;
    return spec;
}

debut_layer to_c(const LayerSpec& l) {
    return debut_layer{l.name.c_str(), l.k, l.c_in, l.c_out, l.h_out, l.w_out};
}

GeneratorConfig from_c(const debut_generator_config* cfg) {
    GeneratorConfig out;
    if (!cfg) return out;
    out.shrink_level = cfg->shrink_level;
    out.kind = cfg->kind == DEBUT_GEN_BULGING ? GenKind::Bulging : GenKind::Mono;
    out.alpha = Rational::parse(std::to_string(cfg->alpha_num) + "/" + std::to_string(cfg->alpha_den));
    if (cfg->pool) {
        require(cfg->pool_len > 0, "empty pool");
        out.pool.clear();
        for (std::size_t i = 0; i < cfg->pool_len; ++i) {
            require(cfg->pool[2 * i] > 0 && cfg->pool[2 * i + 1] > 0, "pool entries must be positive");
            out.pool.emplace_back(cfg->pool[2 * i], cfg->pool[2 * i + 1]);
        }
    }
    out.strict_pot = cfg->strict_pot != 0;
    return out;
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Matrix from_row_major(const double* data, std::size_t rows, std::size_t cols) {
    return Eigen::Map<const RowMajor>(data, static_cast<Idx>(rows), static_cast<Idx>(cols));
}

void to_row_major(const Matrix& m, double* out) { Eigen::Map<RowMajor>(out, m.rows(), m.cols()) = m; }

debut_chain* wrap(ChainSpec spec) {
    auto chain = spec.to_chain();
    return new debut_chain{std::move(chain), spec.layer, spec.has_values()};
}

const std::size_t kDefaultPool[] = {2, 4, 4, 8, 2, 2, 4, 4, 8, 16};
const std::size_t kExtendedPool[] = {2, 4, 4, 8, 2, 2, 4, 4, 8, 16, 1, 2, 1, 1};

}  // namespace

extern "C" {

const char* debut_version(void) { return "1.0.0"; }

const char* debut_status_name(debut_status status) {
    switch (status) {
        case DEBUT_OK: return "Ok";
        case DEBUT_ERR_INVALID_ARGUMENT: return "InvalidArgument";
        case DEBUT_ERR_INVALID_SIGNATURE: return "InvalidSignature";
        case DEBUT_ERR_VALUE_LENGTH_MISMATCH: return "ValueLengthMismatch";
        case DEBUT_ERR_SHAPE_MISMATCH: return "ShapeMismatch";
        case DEBUT_ERR_SHAPE_CHAIN_BREAK: return "ShapeChainBreak";
        case DEBUT_ERR_T_RECURSION_BREAK: return "TRecursionBreak";
        case DEBUT_ERR_UNKNOWN_SCHEME: return "UnknownScheme";
        case DEBUT_ERR_UNSUPPORTED_RATIO: return "UnsupportedRatio";
        case DEBUT_ERR_INFEASIBLE_STAGE3: return "InfeasibleStage3";
        case DEBUT_ERR_NON_INTEGER_BULGE: return "NonIntegerBulge";
        case DEBUT_ERR_POOL_EXHAUSTED: return "PoolExhausted";
        case DEBUT_ERR_FINAL_FACTOR_INFEASIBLE: return "FinalFactorInfeasible";
        case DEBUT_ERR_NON_INTEGRAL_OUTPUT: return "NonIntegralOutput";
        case DEBUT_ERR_SINGULAR_SYSTEM: return "SingularSystem";
        case DEBUT_ERR_MISSING_VALUES: return "MissingValues";
        case DEBUT_ERR_PARSE: return "ParseError";
        case DEBUT_ERR_IO: return "IoError";
        case DEBUT_ERR_INTERNAL: return "InternalError";
    }
    return "Unknown";
}

const char* debut_last_error(void) { return g_last_error.c_str(); }

size_t debut_last_error_factor(void) { return g_last_factor; }

void debut_string_free(char* s) { std::free(s); }

int debut_signature_is_valid(const debut_signature* sig) {
    return sig && from_c(*sig).is_valid() ? 1 : 0;
}

debut_status debut_validate_signatures(const debut_signature* sigs, size_t count, debut_chain_kind* kind,
                                       int* expanding_bulge) {
    return guarded([&] {
        require(sigs != nullptr || count == 0, "null signature array");
        std::vector<FactorSignature> v;
        for (std::size_t i = 0; i < count; ++i) v.push_back(from_c(sigs[i]));
        const auto res = validate_signatures(v);
        if (kind) *kind = res.kind == ChainKind::Monotonic ? DEBUT_MONOTONIC : DEBUT_BULGING;
        if (expanding_bulge) *expanding_bulge = res.expanding_bulge ? 1 : 0;
    });
}

debut_status debut_chain_create(const debut_signature* sigs, size_t count, const double* values,
                                debut_chain** out) {
    return guarded([&] {
        require(out != nullptr, "null output handle");
        require(sigs != nullptr && count > 0, "a chain needs at least one factor");
        ChainSpec spec;
        std::size_t offset = 0;
        for (std::size_t i = 0; i < count; ++i) {
            const auto sig = from_c(sigs[i]);
            spec.sigs.push_back(sig);
            if (values && sig.is_valid()) {
                spec.values.emplace_back(std::vector<double>(values + offset, values + offset + sig.nnz()));
                offset += sig.nnz();
            } else {
                spec.values.emplace_back(std::nullopt);
            }
        }
        *out = wrap(std::move(spec));
    });
}

debut_status debut_chain_parse_json(const char* text, debut_chain** out) {
    return guarded([&] {
        require(text && out, "null argument");
        *out = wrap(parse_chain_spec(text));
    });
}

debut_status debut_chain_load(const char* path, debut_chain** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = wrap(load_chain_spec(path));
    });
}

debut_status debut_chain_save(const debut_chain* chain, const char* path, int include_values) {
    return guarded([&] {
        require(chain && path, "null argument");
        const LayerSpec* layer = chain->layer ? &*chain->layer : nullptr;
        save_chain_spec(ChainSpec::from_chain(chain->chain, layer, include_values != 0), path);
    });
}

debut_status debut_chain_to_json(const debut_chain* chain, int include_values, char** out) {
    return guarded([&] {
        require(chain && out, "null argument");
        const LayerSpec* layer = chain->layer ? &*chain->layer : nullptr;
        *out = dup_string(chain_spec_to_json(ChainSpec::from_chain(chain->chain, layer, include_values != 0)));
    });
}

void debut_chain_free(debut_chain* chain) { delete chain; }

size_t debut_chain_num_factors(const debut_chain* chain) { return chain ? chain->chain.size() : 0; }

debut_status debut_chain_signature(const debut_chain* chain, size_t index, debut_signature* out) {
    return guarded([&] {
        require(chain && out, "null argument");
        require(index < chain->chain.size(), "factor index out of range");
        const auto& s = chain->chain[index].signature();
        *out = debut_signature{s.p, s.q, s.r, s.s, s.t};
    });
}

debut_status debut_chain_values(const debut_chain* chain, size_t index, const double** values, size_t* length) {
    return guarded([&] {
        require(chain && values && length, "null argument");
        require(index < chain->chain.size(), "factor index out of range");
        const auto& v = chain->chain[index].values();
        *values = v.data();
        *length = v.size();
    });
}

void debut_chain_shape(const debut_chain* chain, size_t* rows, size_t* cols) {
    if (!chain) return;
    if (rows) *rows = chain->chain.rows();
    if (cols) *cols = chain->chain.cols();
}

int debut_chain_has_values(const debut_chain* chain) { return chain && chain->has_values ? 1 : 0; }

void debut_chain_get_kind(const debut_chain* chain, debut_chain_kind* kind, int* expanding_bulge) {
    if (!chain) return;
    if (kind) *kind = chain->chain.kind() == ChainKind::Monotonic ? DEBUT_MONOTONIC : DEBUT_BULGING;
    if (expanding_bulge) *expanding_bulge = chain->chain.expanding_bulge() ? 1 : 0;
}

int debut_chain_get_layer(const debut_chain* chain, debut_layer* out) {
    if (!chain || !chain->layer) return 0;
    if (out) *out = to_c(*chain->layer);
    return 1;
}

debut_status debut_chain_set_layer(debut_chain* chain, const debut_layer* layer) {
    return guarded([&] {
        require(chain != nullptr, "null chain");
        if (layer) {
            chain->layer = from_c(*layer);
        } else {
            chain->layer.reset();
        }
    });
}

debut_status debut_chain_stats_get(const debut_chain* chain, int use_layer, debut_chain_stats* out) {
    return guarded([&] {
        require(chain && out, "null argument");
        const LayerSpec* layer = use_layer && chain->layer ? &*chain->layer : nullptr;
        const auto st = chain_stats(chain->chain, layer);
        *out = debut_chain_stats{st.nnz_total, st.macs_per_column, st.macs_bound, st.dense_params,
                                 st.compression_ratio};
    });
}

debut_status debut_chain_random_init(const debut_chain* chain, uint64_t seed, const char* scheme,
                                     debut_chain** out) {
    return guarded([&] {
        require(chain && out, "null argument");
        auto filled = random_init(chain->chain, seed, scheme ? scheme : "uniform-fanin");
        *out = new debut_chain{std::move(filled), chain->layer, true};
    });
}

debut_status debut_chain_apply(const debut_chain* chain, const double* in, size_t cols, double* out,
                               unsigned threads, uint64_t* macs) {
    return guarded([&] {
        require(chain && in && out, "null argument");
        std::uint64_t count = 0;
        apply_chain_rows(chain->chain, in, out, cols, &count, threads);
        if (macs) *macs = count;
    });
}

debut_status debut_chain_expand(const debut_chain* chain, double* out) {
    return guarded([&] {
        require(chain && out, "null argument");
        to_row_major(expand_chain(chain->chain), out);
    });
}

debut_status debut_dense_matmul(const double* a, size_t rows, size_t inner, const double* b, size_t cols,
                                double* out) {
    return guarded([&] {
        require(a && b && out, "null argument");
        const Eigen::Map<const RowMajor> ma(a, static_cast<Idx>(rows), static_cast<Idx>(inner));
        const Eigen::Map<const RowMajor> mb(b, static_cast<Idx>(inner), static_cast<Idx>(cols));
        Eigen::Map<RowMajor>(out, static_cast<Idx>(rows), static_cast<Idx>(cols)).noalias() = ma * mb;
    });
}

debut_status debut_tensor_create(const size_t* dims, size_t rank, const double* data, debut_tensor** out) {
    return guarded([&] {
        require(out != nullptr && (dims != nullptr || rank == 0), "null argument");
        Tensor t(std::vector<std::size_t>(dims, dims + rank));
        if (data) std::copy(data, data + t.size(), t.data.begin());
        *out = new debut_tensor{std::move(t)};
    });
}

debut_status debut_tensor_random(const size_t* dims, size_t rank, uint64_t seed, debut_tensor** out) {
    return guarded([&] {
        require(out != nullptr && (dims != nullptr || rank == 0), "null argument");
        Tensor t(std::vector<std::size_t>(dims, dims + rank));
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (auto& v : t.data) v = dist(rng);
        *out = new debut_tensor{std::move(t)};
    });
}

debut_status debut_tensor_load(const char* path, debut_tensor** out, debut_dtype* dtype) {
    return guarded([&] {
        require(path && out, "null argument");
        DType dt = DType::F64;
        auto t = load_tensor(path, &dt);
        if (dtype) *dtype = dt == DType::F32 ? DEBUT_F32 : DEBUT_F64;
        *out = new debut_tensor{std::move(t)};
    });
}

debut_status debut_tensor_save(const debut_tensor* tensor, const char* path, debut_dtype dtype) {
    return guarded([&] {
        require(tensor && path, "null argument");
        save_tensor(tensor->tensor, path, dtype == DEBUT_F32 ? DType::F32 : DType::F64);
    });
}

void debut_tensor_free(debut_tensor* tensor) { delete tensor; }

size_t debut_tensor_rank(const debut_tensor* tensor) { return tensor ? tensor->tensor.rank() : 0; }

const size_t* debut_tensor_dims(const debut_tensor* tensor) {
    return tensor ? tensor->tensor.dims.data() : nullptr;
}

size_t debut_tensor_size(const debut_tensor* tensor) { return tensor ? tensor->tensor.size() : 0; }

const double* debut_tensor_data(const debut_tensor* tensor) {
    return tensor ? tensor->tensor.data.data() : nullptr;
}

double* debut_tensor_data_mut(debut_tensor* tensor) { return tensor ? tensor->tensor.data.data() : nullptr; }

debut_status debut_tensor_max_abs_diff(const debut_tensor* a, const debut_tensor* b, double* out) {
    return guarded([&] {
        require(a && b && out, "null argument");
        if (a->tensor.dims != b->tensor.dims) throw Error(ErrorCode::ShapeMismatch, "tensor shapes differ");
        double m = 0.0;
        for (std::size_t i = 0; i < a->tensor.size(); ++i)
            m = std::max(m, std::abs(a->tensor.data[i] - b->tensor.data[i]));
        *out = m;
    });
}

size_t debut_round_pot(size_t c) { return round_pot(c); }

void debut_generator_config_default(debut_generator_config* cfg) {
    if (!cfg) return;
    *cfg = debut_generator_config{3, DEBUT_GEN_MONO, 3, 2, nullptr, 0, 0};
}

debut_status debut_pool_named(const char* name, const size_t** pool, size_t* pool_len) {
    return guarded([&] {
        require(name && pool && pool_len, "null argument");
        const std::string n(name);
        if (n == "default") {
            *pool = kDefaultPool;
            *pool_len = std::size(kDefaultPool) / 2;
        } else if (n == "extended") {
            *pool = kExtendedPool;
            *pool_len = std::size(kExtendedPool) / 2;
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown pool '" + n + "'");
        }
    });
}

debut_status debut_generate_chain(const debut_layer* layer, const debut_generator_config* cfg,
                                  debut_chain** out, double* eta) {
    return guarded([&] {
        require(layer && out, "null argument");
        const auto spec = from_c(*layer);
        const auto plan = generate_chain(spec, from_c(cfg));
        *out = new debut_chain{plan.structure(), spec, false};
        if (eta) *eta = plan.eta;
    });
}

debut_status debut_generate_plan_json(const debut_layer* layer, const debut_generator_config* cfg, char** out) {
    return guarded([&] {
        require(layer && out, "null argument");
        *out = dup_string(plan_to_json(generate_chain(from_c(*layer), from_c(cfg))));
    });
}

debut_status debut_model_generate(const char* model_json, const debut_generator_config* cfg,
                                  debut_model_report** out) {
    return guarded([&] {
        require(model_json && out, "null argument");
        auto report = generate_model(parse_model_spec(model_json), from_c(cfg));
        auto* r = new debut_model_report{std::move(report), {}};
        for (const auto& l : r->report.layers) {
            if (l.plan) {
                r->chains.emplace_back(debut_chain{l.plan->structure(), l.plan->layer, false});
            } else {
                r->chains.emplace_back(std::nullopt);
            }
        }
        *out = r;
    });
}

size_t debut_model_report_num_layers(const debut_model_report* report) {
    return report ? report->report.layers.size() : 0;
}

debut_status debut_model_report_layer(const debut_model_report* report, size_t index, const char** name,
                                      int* keep_dense, uint64_t* params, uint64_t* dense_params, double* eta,
                                      const debut_chain** chain) {
    return guarded([&] {
        require(report != nullptr, "null report");
        require(index < report->report.layers.size(), "layer index out of range");
        const auto& l = report->report.layers[index];
        if (name) *name = l.name.c_str();
        if (keep_dense) *keep_dense = l.keep_dense ? 1 : 0;
        if (params) *params = l.params;
        if (dense_params) *dense_params = l.dense_params;
        if (eta) *eta = l.plan ? l.plan->eta : 0.0;
        if (chain) *chain = report->chains[index] ? &*report->chains[index] : nullptr;
    });
}

void debut_model_report_totals(const debut_model_report* report, uint64_t* params, uint64_t* dense_params,
                               double* mc) {
    if (!report) return;
    if (params) *params = report->report.total_params;
    if (dense_params) *dense_params = report->report.dense_params;
    if (mc) *mc = report->report.mc;
}

debut_status debut_model_report_to_json(const debut_model_report* report, char** out) {
    return guarded([&] {
        require(report && out, "null argument");
        *out = dup_string(model_report_to_json(report->report));
    });
}

void debut_model_report_free(debut_model_report* report) { delete report; }

debut_status debut_conv_apply(const debut_chain* chain, const debut_tensor* x, const debut_layer* layer,
                              size_t stride, size_t padding, debut_conv_mode mode, debut_tensor** out,
                              uint64_t* macs) {
    return guarded([&] {
        require(chain && x && out, "null argument");
        LayerSpec spec;
        if (layer) {
            spec = from_c(*layer);
        } else if (chain->layer) {
            spec = *chain->layer;
        } else {
            throw Error(ErrorCode::InvalidArgument, "chain has no layer metadata and none was given");
        }
        const ConvParams cp{stride, padding};
        std::uint64_t count = 0;
        Tensor result;
        switch (mode) {
            case DEBUT_MODE_CHAIN: result = conv_via_chain(chain->chain, x->tensor, spec, cp, &count); break;
            case DEBUT_MODE_DSC: result = apply_dsc(interpret_as_dsc(chain->chain, spec), x->tensor, cp); break;
            case DEBUT_MODE_DENSE: result = conv_via_expanded(chain->chain, x->tensor, spec, cp); break;
            default: throw Error(ErrorCode::InvalidArgument, "unknown execution mode");
        }
        if (macs) *macs = count;
        *out = new debut_tensor{std::move(result)};
    });
}

debut_status debut_conv_direct(const debut_tensor* kernel, const debut_tensor* x, size_t stride, size_t padding,
                               debut_tensor** out) {
    return guarded([&] {
        require(kernel && x && out, "null argument");
        *out = new debut_tensor{conv_direct(kernel->tensor, x->tensor, ConvParams{stride, padding})};
    });
}

debut_status debut_classify_rightmost(const debut_chain* chain, size_t k, debut_sampling_case* out) {
    return guarded([&] {
        require(chain && out, "null argument");
        switch (classify_rightmost(chain->chain[0], k)) {
            case SamplingCase::SubSampling: *out = DEBUT_SUB_SAMPLING; break;
            case SamplingCase::Exact: *out = DEBUT_EXACT; break;
            case SamplingCase::UpSampling: *out = DEBUT_UP_SAMPLING; break;
        }
    });
}

debut_status debut_dsc_describe(const debut_chain* chain, const debut_layer* layer, char** out) {
    return guarded([&] {
        require(chain && out, "null argument");
        LayerSpec spec;
        if (layer) {
            spec = from_c(*layer);
        } else if (chain->layer) {
            spec = *chain->layer;
        } else {
            throw Error(ErrorCode::InvalidArgument, "chain has no layer metadata and none was given");
        }
        const auto plan = interpret_as_dsc(chain->chain, spec);
        nlohmann::json j;
        const auto& dw = plan.depthwise;
        j["depthwise"] = {{"rows", dw.rows.size()},
                          {"in_channels", dw.in_channels},
                          {"kernels_per_channel", dw.kernels_per_channel},
                          {"taps_per_row", dw.rows.empty() ? 0 : dw.rows.front().taps.size()},
                          {"sampling", sampling_case_name(dw.sampling)},
                          {"cross_channel_rows", plan.cross_channel_rows()}};
        std::size_t covered = 0;
        for (std::size_t c = 0; c < dw.in_channels; ++c) {
            const auto cov = plan.pixel_coverage(c);
            if (std::all_of(cov.begin(), cov.end(), [](bool b) { return b; })) ++covered;
        }
        j["depthwise"]["fully_covered_channels"] = covered;
        auto stages = nlohmann::json::array();
        for (const auto& st : plan.pointwise) {
            stages.push_back({{"rows", st.rows.size()},
                              {"in_slices", st.in_slices},
                              {"slices_per_row", st.rows.empty() ? 0 : st.rows.front().slices.size()}});
        }
        j["pointwise"] = std::move(stages);
        *out = dup_string(j.dump(2));
    });
}

debut_status debut_kl_feature_distance(const double* a, const double* b, size_t rows, size_t cols,
                                       debut_kl_mode mode, double* out) {
    return guarded([&] {
        require(a && b && out, "null argument");
        *out = kl_feature_distance(from_row_major(a, rows, cols), from_row_major(b, rows, cols),
                                   mode == DEBUT_KL_RAW ? KlMode::Raw : KlMode::Softmax);
    });
}

void debut_fit_options_default(debut_fit_options* opts) {
    if (!opts) return;
    const FitOptions d;
    *opts = debut_fit_options{d.max_sweeps, d.rel_tol, d.ridge, d.seed};
}

debut_status debut_als_fit(const debut_chain* structure, const debut_tensor* target, const debut_fit_options* opts,
                           debut_chain** out, debut_fit_report** report) {
    return guarded([&] {
        require(structure && target && out, "null argument");
        FitOptions o;
        if (opts) o = FitOptions{opts->max_sweeps, opts->rel_tol, opts->ridge, opts->seed};
        auto res = als_fit(structure->chain, tensor_to_matrix(target->tensor), o);
        *out = new debut_chain{std::move(res.chain), structure->layer, true};
        if (report) *report = new debut_fit_report{std::move(res.report)};
    });
}

debut_status debut_fit_error(const debut_chain* chain, const debut_tensor* target, double* out) {
    return guarded([&] {
        require(chain && target && out, "null argument");
        *out = fit_error(chain->chain, tensor_to_matrix(target->tensor));
    });
}

double debut_fit_report_final_error(const debut_fit_report* report) {
    return report ? report->report.final_error : 0.0;
}

double debut_fit_report_initial_error(const debut_fit_report* report) {
    return report ? report->report.initial_error : 0.0;
}

size_t debut_fit_report_sweeps(const debut_fit_report* report) { return report ? report->report.sweeps_used : 0; }

size_t debut_fit_report_trace_length(const debut_fit_report* report) {
    return report ? report->report.error_trace.size() : 0;
}

debut_status debut_fit_report_trace_step(const debut_fit_report* report, size_t index, size_t* sweep,
                                         size_t* factor, double* error) {
    return guarded([&] {
        require(report != nullptr, "null report");
        require(index < report->report.error_trace.size(), "trace index out of range");
        const auto& s = report->report.error_trace[index];
        if (sweep) *sweep = s.sweep;
        if (factor) *factor = s.factor;
        if (error) *error = s.error;
    });
}

void debut_fit_report_free(debut_fit_report* report) { delete report; }

}  // extern "C"
