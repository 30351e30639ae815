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

/*
 * C interface to libdebut.
 *
 * Objects are opaque handles created by the library and released with the
 * matching *_free function. Every fallible call returns a debut_status; on
 * failure debut_last_error() holds a message for the calling thread and
 * debut_last_error_factor() the 1-based factor index it refers to (0 when
 * not factor specific).
 *
 * Matrices crossing this interface are dense row-major arrays of double.
 * Chains list factors rightmost first: factor 0 is applied to the input first.
 */

#ifndef DEBUT_H
#define DEBUT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define DEBUT_API __declspec(dllexport)
#else
#  define DEBUT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum debut_status {
    DEBUT_OK = 0,
    DEBUT_ERR_INVALID_ARGUMENT = 1,
    DEBUT_ERR_INVALID_SIGNATURE = 2,
    DEBUT_ERR_VALUE_LENGTH_MISMATCH = 3,
    DEBUT_ERR_SHAPE_MISMATCH = 4,
    DEBUT_ERR_SHAPE_CHAIN_BREAK = 5,
    DEBUT_ERR_T_RECURSION_BREAK = 6,
    DEBUT_ERR_UNKNOWN_SCHEME = 7,
    DEBUT_ERR_UNSUPPORTED_RATIO = 8,
    DEBUT_ERR_INFEASIBLE_STAGE3 = 9,
    DEBUT_ERR_NON_INTEGER_BULGE = 10,
    DEBUT_ERR_POOL_EXHAUSTED = 11,
    DEBUT_ERR_FINAL_FACTOR_INFEASIBLE = 12,
    DEBUT_ERR_NON_INTEGRAL_OUTPUT = 13,
    DEBUT_ERR_SINGULAR_SYSTEM = 14,
    DEBUT_ERR_MISSING_VALUES = 15,
    DEBUT_ERR_PARSE = 16,
    DEBUT_ERR_IO = 17,
    DEBUT_ERR_INTERNAL = 99
} debut_status;

typedef enum debut_chain_kind { DEBUT_MONOTONIC = 0, DEBUT_BULGING = 1 } debut_chain_kind;
typedef enum debut_gen_kind { DEBUT_GEN_MONO = 0, DEBUT_GEN_BULGING = 1 } debut_gen_kind;
typedef enum debut_dtype { DEBUT_F32 = 0, DEBUT_F64 = 1 } debut_dtype;
typedef enum debut_conv_mode { DEBUT_MODE_CHAIN = 0, DEBUT_MODE_DSC = 1, DEBUT_MODE_DENSE = 2 } debut_conv_mode;
typedef enum debut_kl_mode { DEBUT_KL_SOFTMAX = 0, DEBUT_KL_RAW = 1 } debut_kl_mode;
typedef enum debut_sampling_case {
    DEBUT_SUB_SAMPLING = 0,
    DEBUT_EXACT = 1,
    DEBUT_UP_SAMPLING = 2
} debut_sampling_case;

typedef struct debut_chain debut_chain;
typedef struct debut_tensor debut_tensor;
typedef struct debut_model_report debut_model_report;
typedef struct debut_fit_report debut_fit_report;

typedef struct debut_signature {
    size_t p, q, r, s, t;
} debut_signature;

/* `name` is borrowed: copied on input, owned by the source object on output. */
typedef struct debut_layer {
    const char* name;
    size_t k;
    size_t c_in;
    size_t c_out;
    size_t h_out;
    size_t w_out;
} debut_layer;

typedef struct debut_chain_stats {
    uint64_t nnz_total;
    uint64_t macs_per_column;
    uint64_t macs_bound;
    uint64_t dense_params;
    double compression_ratio;
} debut_chain_stats;

/* `pool` holds pool_len (r, s) pairs flattened; NULL selects the default pool. */
typedef struct debut_generator_config {
    size_t shrink_level;
    debut_gen_kind kind;
    uint64_t alpha_num;
    uint64_t alpha_den;
    const size_t* pool;
    size_t pool_len;
    int strict_pot;
} debut_generator_config;

typedef struct debut_fit_options {
    size_t max_sweeps;
    double rel_tol;
    double ridge;
    uint64_t seed;
} debut_fit_options;

/* ---- diagnostics ------------------------------------------------------- */

DEBUT_API const char* debut_version(void);
DEBUT_API const char* debut_status_name(debut_status status);
DEBUT_API const char* debut_last_error(void);
DEBUT_API size_t debut_last_error_factor(void);
DEBUT_API void debut_string_free(char* s);

/* ---- factors and chains ------------------------------------------------ */

DEBUT_API int debut_signature_is_valid(const debut_signature* sig);
DEBUT_API debut_status debut_validate_signatures(const debut_signature* sigs, size_t count,
                                                 debut_chain_kind* kind, int* expanding_bulge);

/* `values` is NULL (zero-filled) or the concatenation of every factor's
 * p*s nonzeros in canonical row-major order. */
DEBUT_API debut_status debut_chain_create(const debut_signature* sigs, size_t count,
                                          const double* values, debut_chain** out);
DEBUT_API debut_status debut_chain_parse_json(const char* text, debut_chain** out);
DEBUT_API debut_status debut_chain_load(const char* path, debut_chain** out);
DEBUT_API debut_status debut_chain_save(const debut_chain* chain, const char* path, int include_values);
DEBUT_API debut_status debut_chain_to_json(const debut_chain* chain, int include_values, char** out);
DEBUT_API void debut_chain_free(debut_chain* chain);

DEBUT_API size_t debut_chain_num_factors(const debut_chain* chain);
DEBUT_API debut_status debut_chain_signature(const debut_chain* chain, size_t index, debut_signature* out);
DEBUT_API debut_status debut_chain_values(const debut_chain* chain, size_t index, const double** values,
                                          size_t* length);
DEBUT_API void debut_chain_shape(const debut_chain* chain, size_t* rows, size_t* cols);
/* Nonzero when every factor carried explicit values in its source. */
DEBUT_API int debut_chain_has_values(const debut_chain* chain);
DEBUT_API void debut_chain_get_kind(const debut_chain* chain, debut_chain_kind* kind, int* expanding_bulge);
DEBUT_API int debut_chain_get_layer(const debut_chain* chain, debut_layer* out);
DEBUT_API debut_status debut_chain_set_layer(debut_chain* chain, const debut_layer* layer);
/* Dense reference is the layer's C_o*C_i*k^2 when use_layer is set and a layer
 * is attached, p_m*q_1 otherwise. */
DEBUT_API debut_status debut_chain_stats_get(const debut_chain* chain, int use_layer, debut_chain_stats* out);
DEBUT_API debut_status debut_chain_random_init(const debut_chain* chain, uint64_t seed, const char* scheme,
                                               debut_chain** out);

/* in: q_1 x cols, out: p_m x cols. `macs` (nullable) receives the multiply-add count. */
DEBUT_API debut_status debut_chain_apply(const debut_chain* chain, const double* in, size_t cols,
                                         double* out, unsigned threads, uint64_t* macs);
/* out: p_m x q_1. */
DEBUT_API debut_status debut_chain_expand(const debut_chain* chain, double* out);
/* Plain dense product a (rows x inner) * b (inner x cols), used as a baseline. */
DEBUT_API debut_status debut_dense_matmul(const double* a, size_t rows, size_t inner, const double* b,
                                          size_t cols, double* out);

/* ---- tensors ----------------------------------------------------------- */

DEBUT_API debut_status debut_tensor_create(const size_t* dims, size_t rank, const double* data,
                                           debut_tensor** out);
/* Uniform [-1, 1) entries from a seeded generator. */
DEBUT_API debut_status debut_tensor_random(const size_t* dims, size_t rank, uint64_t seed, debut_tensor** out);
DEBUT_API debut_status debut_tensor_load(const char* path, debut_tensor** out, debut_dtype* dtype);
DEBUT_API debut_status debut_tensor_save(const debut_tensor* tensor, const char* path, debut_dtype dtype);
DEBUT_API void debut_tensor_free(debut_tensor* tensor);
DEBUT_API size_t debut_tensor_rank(const debut_tensor* tensor);
DEBUT_API const size_t* debut_tensor_dims(const debut_tensor* tensor);
DEBUT_API size_t debut_tensor_size(const debut_tensor* tensor);
DEBUT_API const double* debut_tensor_data(const debut_tensor* tensor);
DEBUT_API double* debut_tensor_data_mut(debut_tensor* tensor);
DEBUT_API debut_status debut_tensor_max_abs_diff(const debut_tensor* a, const debut_tensor* b, double* out);

/* ---- generator --------------------------------------------------------- */

DEBUT_API size_t debut_round_pot(size_t c);
DEBUT_API void debut_generator_config_default(debut_generator_config* cfg);
/* Named pools: "default" or "extended". Pointers are static. */
DEBUT_API debut_status debut_pool_named(const char* name, const size_t** pool, size_t* pool_len);
/* Structure-only chain with the layer attached; `eta` against C_o*C_i*k^2. */
DEBUT_API debut_status debut_generate_chain(const debut_layer* layer, const debut_generator_config* cfg,
                                            debut_chain** out, double* eta);
/* Chain spec JSON plus the generator's S_sup / S_sub record. */
DEBUT_API debut_status debut_generate_plan_json(const debut_layer* layer, const debut_generator_config* cfg,
                                                char** out);

DEBUT_API debut_status debut_model_generate(const char* model_json, const debut_generator_config* cfg,
                                            debut_model_report** out);
DEBUT_API size_t debut_model_report_num_layers(const debut_model_report* report);
/* `chain` is borrowed from the report and NULL for dense layers; eta is 0 for them. */
DEBUT_API debut_status debut_model_report_layer(const debut_model_report* report, size_t index,
                                                const char** name, int* keep_dense, uint64_t* params,
                                                uint64_t* dense_params, double* eta,
                                                const debut_chain** chain);
DEBUT_API void debut_model_report_totals(const debut_model_report* report, uint64_t* params,
                                         uint64_t* dense_params, double* mc);
DEBUT_API debut_status debut_model_report_to_json(const debut_model_report* report, char** out);
DEBUT_API void debut_model_report_free(debut_model_report* report);

/* ---- convolution ------------------------------------------------------- */

/* x: H x W x C_i feature map. `layer` may be NULL to use the chain's own.
 * Output is H_o x W_o x C_o. */
DEBUT_API debut_status debut_conv_apply(const debut_chain* chain, const debut_tensor* x,
                                        const debut_layer* layer, size_t stride, size_t padding,
                                        debut_conv_mode mode, debut_tensor** out, uint64_t* macs);
DEBUT_API debut_status debut_conv_direct(const debut_tensor* kernel, const debut_tensor* x, size_t stride,
                                         size_t padding, debut_tensor** out);
DEBUT_API debut_status debut_classify_rightmost(const debut_chain* chain, size_t k, debut_sampling_case* out);
/* JSON description of the depthwise / masked pointwise reading of a chain. */
DEBUT_API debut_status debut_dsc_describe(const debut_chain* chain, const debut_layer* layer, char** out);
DEBUT_API debut_status debut_kl_feature_distance(const double* a, const double* b, size_t rows, size_t cols,
                                                 debut_kl_mode mode, double* out);

/* ---- fitting ----------------------------------------------------------- */

DEBUT_API void debut_fit_options_default(debut_fit_options* opts);
/* target: rank-2 tensor p_m x q_1. */
DEBUT_API debut_status debut_als_fit(const debut_chain* structure, const debut_tensor* target,
                                     const debut_fit_options* opts, debut_chain** out,
                                     debut_fit_report** report);
DEBUT_API debut_status debut_fit_error(const debut_chain* chain, const debut_tensor* target, double* out);
DEBUT_API double debut_fit_report_final_error(const debut_fit_report* report);
DEBUT_API double debut_fit_report_initial_error(const debut_fit_report* report);
DEBUT_API size_t debut_fit_report_sweeps(const debut_fit_report* report);
DEBUT_API size_t debut_fit_report_trace_length(const debut_fit_report* report);
DEBUT_API debut_status debut_fit_report_trace_step(const debut_fit_report* report, size_t index,
                                                   size_t* sweep, size_t* factor, double* error);
DEBUT_API void debut_fit_report_free(debut_fit_report* report);

#ifdef __cplusplus
}
#endif

#endif /* DEBUT_H */
