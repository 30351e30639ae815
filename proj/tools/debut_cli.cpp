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

// Command-line front end over the C API.
//
// Exit codes: 0 success, 1 usage, 2 validation, 3 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "debut/debut.h"

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct ChainDeleter {
    void operator()(debut_chain* c) const { debut_chain_free(c); }
};
struct TensorDeleter {
    void operator()(debut_tensor* t) const { debut_tensor_free(t); }
};
struct ModelDeleter {
    void operator()(debut_model_report* r) const { debut_model_report_free(r); }
};
struct FitDeleter {
    void operator()(debut_fit_report* r) const { debut_fit_report_free(r); }
};
struct StringDeleter {
    void operator()(char* s) const { debut_string_free(s); }
};

using ChainPtr = std::unique_ptr<debut_chain, ChainDeleter>;
using TensorPtr = std::unique_ptr<debut_tensor, TensorDeleter>;
using ModelPtr = std::unique_ptr<debut_model_report, ModelDeleter>;
using FitPtr = std::unique_ptr<debut_fit_report, FitDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

/// Carries a library status (or a usage problem) up to main.
struct Failure : std::runtime_error {
    int exit_code;
    explicit Failure(int code, const std::string& msg) : std::runtime_error(msg), exit_code(code) {}
};

int exit_code_for(debut_status st) {
    switch (st) {
        case DEBUT_OK:
            return kExitOk;
        case DEBUT_ERR_INVALID_ARGUMENT:
            return kExitUsage;
        case DEBUT_ERR_SINGULAR_SYSTEM:
        case DEBUT_ERR_INTERNAL:
            return kExitNumerical;
        default:
            return kExitValidation;
    }
}

void check(debut_status st) {
    if (st == DEBUT_OK) return;
    std::string msg = debut_status_name(st);
    const size_t factor = debut_last_error_factor();
    if (factor > 0) msg += " at factor " + std::to_string(factor);
    const std::string detail = debut_last_error();
    if (!detail.empty()) msg += ": " + detail;
    throw Failure(exit_code_for(st), msg);
}

std::string take(char* s) {
    StringPtr holder(s);
    return s ? std::string(s) : std::string();
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Failure(kExitValidation, "IO: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f || !(f << text)) throw Failure(kExitValidation, "IO: cannot write '" + path + "'");
}

std::vector<size_t> parse_size_list(const std::string& text, const char* what) {
    std::vector<size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            const long v = std::stol(item, &used);
            if (used != item.size() || v <= 0) throw std::invalid_argument(item);
            out.push_back(static_cast<size_t>(v));
        } catch (const std::exception&) {
            throw Failure(kExitUsage, std::string("bad ") + what + " '" + text + "'");
        }
    }
    return out;
}

/// "3/2", "2" or a short decimal such as "1.5".
std::pair<uint64_t, uint64_t> parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash != std::string::npos) {
            const auto num = std::stoull(text.substr(0, slash));
            const auto den = std::stoull(text.substr(slash + 1));
            if (num > 0 && den > 0) return {num, den};
        } else {
            const auto dot = text.find('.');
            const std::string digits = dot == std::string::npos ? text : text.substr(0, dot) + text.substr(dot + 1);
            uint64_t den = 1;
            if (dot != std::string::npos)
                for (size_t i = dot + 1; i < text.size(); ++i) den *= 10;
            const auto num = std::stoull(digits);
            if (num > 0) return {num, den};
        }
    } catch (const std::exception&) {
    }
    throw Failure(kExitUsage, "bad rational '" + text + "'");
}

debut_layer parse_layer(const std::string& text, const std::string& name) {
    const auto v = parse_size_list(text, "layer");
    if (v.size() != 3 && v.size() != 5) throw Failure(kExitUsage, "--layer expects k,Ci,Co[,Ho,Wo]");
    return debut_layer{name.c_str(), v[0], v[1], v[2], v.size() == 5 ? v[3] : 0, v.size() == 5 ? v[4] : 0};
}

ChainPtr load_chain(const std::string& path) {
    debut_chain* c = nullptr;
    check(debut_chain_load(path.c_str(), &c));
    return ChainPtr(c);
}

TensorPtr load_tensor(const std::string& path, debut_dtype* dtype = nullptr) {
    debut_tensor* t = nullptr;
    check(debut_tensor_load(path.c_str(), &t, dtype));
    return TensorPtr(t);
}

debut_dtype parse_dtype(const std::string& s) { return s == "f32" ? DEBUT_F32 : DEBUT_F64; }

std::string join(const json& arr) {
    std::string out = "[";
    for (size_t i = 0; i < arr.size(); ++i) {
        if (i) out += ", ";
        out += "(";
        for (size_t j = 0; j < arr[i].size(); ++j) {
            if (j) out += ",";
            out += std::to_string(arr[i][j].get<size_t>());
        }
        out += ")";
    }
    return out + "]";
}

// generate

struct GenerateArgs {
    std::string layer;
    std::string name = "layer";
    std::string model;
    std::string kind = "mono";
    size_t n = 0;
    std::string alpha;
    std::string pool = "default";
    bool strict_pot = false;
    std::string out;
    std::string sweep_n;
};

std::vector<size_t> pool_storage;

debut_generator_config make_config(const GenerateArgs& a) {
    debut_generator_config cfg;
    debut_generator_config_default(&cfg);
    cfg.kind = a.kind == "bulging" ? DEBUT_GEN_BULGING : DEBUT_GEN_MONO;
    if (a.n > 0) cfg.shrink_level = a.n;
    if (!a.alpha.empty()) {
        const auto [num, den] = parse_rational(a.alpha);
        cfg.alpha_num = num;
        cfg.alpha_den = den;
    }
    if (a.pool == "default" || a.pool == "extended") {
        check(debut_pool_named(a.pool.c_str(), &cfg.pool, &cfg.pool_len));
    } else {
        json j;
        try {
            j = json::parse(read_file(a.pool));
            pool_storage.clear();
            for (const auto& e : j) {
                if (e.size() != 2) throw std::invalid_argument("entry");
                pool_storage.push_back(e[0].get<size_t>());
                pool_storage.push_back(e[1].get<size_t>());
            }
        } catch (const Failure&) {
            throw;
        } catch (const std::exception&) {
            throw Failure(kExitValidation, "ParseError: pool file must be a JSON list of [r, s] pairs");
        }
        cfg.pool = pool_storage.data();
        cfg.pool_len = pool_storage.size() / 2;
    }
    cfg.strict_pot = a.strict_pot ? 1 : 0;
    return cfg;
}

int cmd_generate_layer(const GenerateArgs& a) {
    const debut_layer layer = parse_layer(a.layer, a.name);
    const auto cfg = make_config(a);
    char* text = nullptr;
    check(debut_generate_plan_json(&layer, &cfg, &text));
    const std::string plan = take(text);
    const json j = json::parse(plan);
    const auto& g = j["generator"];
    std::printf("layer %s: k=%zu Ci=%zu Co=%zu (padded %zu -> %zu)\n", a.name.c_str(), layer.k, layer.c_in,
                layer.c_out, g["Ci_padded"].get<size_t>(), g["Co_padded"].get<size_t>());
    std::printf("  factors: %zu, requested %s, validated %s\n", g["S_sup"].size(),
                g["requested_kind"].get<std::string>().c_str(), g["validated_kind"].get<std::string>().c_str());
    std::printf("  S_sup: %s\n", join(g["S_sup"]).c_str());
    std::printf("  S_sub: %s\n", join(g["S_sub"]).c_str());
    std::printf("  nnz=%zu, dense=%zu, eta=%.4f\n", g["nnz"].get<size_t>(),
                layer.c_out * layer.c_in * layer.k * layer.k, g["eta"].get<double>());
    if (!a.out.empty()) write_file(a.out, plan + "\n");
    return kExitOk;
}

void print_model(const debut_model_report* rep) {
    const size_t n = debut_model_report_num_layers(rep);
    std::printf("%-12s %6s %12s %12s %8s  %s\n", "layer", "kind", "params", "dense", "eta", "S_sub");
    for (size_t i = 0; i < n; ++i) {
        const char* name = nullptr;
        int keep = 0;
        uint64_t params = 0, dense = 0;
        double eta = 0.0;
        const debut_chain* chain = nullptr;
        check(debut_model_report_layer(rep, i, &name, &keep, &params, &dense, &eta, &chain));
        std::string subs = "-";
        if (chain) {
            subs.clear();
            for (size_t f = 0; f < debut_chain_num_factors(chain); ++f) {
                debut_signature s{};
                debut_chain_signature(chain, f, &s);
                subs += (f ? " " : "") + std::string("(") + std::to_string(s.r) + "," + std::to_string(s.s) + "," +
                        std::to_string(s.t) + ")";
            }
        }
        std::printf("%-12s %6s %12llu %12llu %8.4f  %s\n", name, keep ? "dense" : "debut",
                    static_cast<unsigned long long>(params), static_cast<unsigned long long>(dense), eta,
                    subs.c_str());
    }
    uint64_t params = 0, dense = 0;
    double mc = 0.0;
    debut_model_report_totals(rep, &params, &dense, &mc);
    std::printf("total: %.3fM params vs %.3fM dense, MC=%.2f%%\n", static_cast<double>(params) / 1e6,
                static_cast<double>(dense) / 1e6, 100.0 * mc);
}

int cmd_generate_model(GenerateArgs a) {
    const std::string spec = read_file(a.model);
    if (!a.sweep_n.empty()) {
        const auto colon = a.sweep_n.find(':');
        if (colon == std::string::npos) throw Failure(kExitUsage, "--sweep-N expects FROM:TO");
        const auto lo = parse_size_list(a.sweep_n.substr(0, colon), "--sweep-N");
        const auto hi = parse_size_list(a.sweep_n.substr(colon + 1), "--sweep-N");
        if (lo.size() != 1 || hi.size() != 1 || lo[0] > hi[0]) throw Failure(kExitUsage, "--sweep-N expects FROM:TO");
        std::string csv = "N,params,dense_params,mc,error\n";
        std::printf("%4s %12s %12s %8s\n", "N", "params", "dense", "MC");
        size_t ok = 0;
        for (size_t n = lo[0]; n <= hi[0]; ++n) {
            a.n = n;
            const auto cfg = make_config(a);
            debut_model_report* raw = nullptr;
            try {
                check(debut_model_generate(spec.c_str(), &cfg, &raw));
            } catch (const Failure& e) {
                std::printf("%4zu  not generable: %s\n", n, e.what());
                const std::string what = e.what();
                csv += std::to_string(n) + ",,,," + what.substr(0, what.find(' ')) + "\n";
                continue;
            }
            ModelPtr rep(raw);
            uint64_t params = 0, dense = 0;
            double mc = 0.0;
            debut_model_report_totals(rep.get(), &params, &dense, &mc);
            std::printf("%4zu %12llu %12llu %7.2f%%\n", n, static_cast<unsigned long long>(params),
                        static_cast<unsigned long long>(dense), 100.0 * mc);
            csv += std::to_string(n) + "," + std::to_string(params) + "," + std::to_string(dense) + "," +
                   std::to_string(mc) + ",\n";
            ++ok;
        }
        if (!a.out.empty()) write_file(a.out, csv);
        if (ok == 0) throw Failure(kExitValidation, "no shrinking level in the sweep was generable");
        return kExitOk;
    }
    const auto cfg = make_config(a);
    debut_model_report* raw = nullptr;
    check(debut_model_generate(spec.c_str(), &cfg, &raw));
    ModelPtr rep(raw);
    print_model(rep.get());
    if (!a.out.empty()) {
        char* text = nullptr;
        check(debut_model_report_to_json(rep.get(), &text));
        write_file(a.out, take(text) + "\n");
    }
    return kExitOk;
}

// validate

int cmd_validate(const std::string& path) {
    const auto chain = load_chain(path);
    debut_chain_kind kind;
    int expanding = 0;
    debut_chain_get_kind(chain.get(), &kind, &expanding);
    const int has_layer = debut_chain_get_layer(chain.get(), nullptr);
    debut_chain_stats st{};
    check(debut_chain_stats_get(chain.get(), has_layer, &st));
    size_t rows = 0, cols = 0;
    debut_chain_shape(chain.get(), &rows, &cols);
    std::printf("%s, nnz=%llu, eta=%.4f\n", kind == DEBUT_MONOTONIC ? "Monotonic" : "Bulging",
                static_cast<unsigned long long>(st.nnz_total), st.compression_ratio);
    std::printf("  product %zux%zu, %zu factors, macs/col=%llu, macs_bound=%llu, dense=%llu%s\n", rows, cols,
                debut_chain_num_factors(chain.get()), static_cast<unsigned long long>(st.macs_per_column),
                static_cast<unsigned long long>(st.macs_bound), static_cast<unsigned long long>(st.dense_params),
                debut_chain_has_values(chain.get()) ? ", values present" : ", structure only");
    if (expanding) std::printf("  note: expanding bulge (output taller than input with an intermediate dip)\n");
    return kExitOk;
}

// apply

struct ApplyArgs {
    std::string chain;
    std::string input;
    std::string layer;
    size_t stride = 1;
    size_t pad = 0;
    std::string mode = "chain";
    std::string out;
    std::string dtype = "f64";
    bool verify = false;
    unsigned threads = 1;
};

debut_conv_mode parse_mode(const std::string& m) {
    if (m == "dsc") return DEBUT_MODE_DSC;
    if (m == "dense") return DEBUT_MODE_DENSE;
    return DEBUT_MODE_CHAIN;
}

TensorPtr apply_matrix(const debut_chain* chain, const debut_tensor* x, const std::string& mode, unsigned threads,
                       uint64_t* macs) {
    size_t rows = 0, cols = 0;
    debut_chain_shape(chain, &rows, &cols);
    const size_t* d = debut_tensor_dims(x);
    if (d[0] != cols) {
        throw Failure(kExitValidation, "ShapeMismatch: input has " + std::to_string(d[0]) + " rows, chain expects " +
                                           std::to_string(cols));
    }
    const size_t n = d[1];
    const size_t dims[] = {rows, n};
    debut_tensor* out = nullptr;
    check(debut_tensor_create(dims, 2, nullptr, &out));
    TensorPtr y(out);
    if (mode == "dense") {
        std::vector<double> dense(rows * cols);
        check(debut_chain_expand(chain, dense.data()));
        check(debut_dense_matmul(dense.data(), rows, cols, debut_tensor_data(x), n, debut_tensor_data_mut(out)));
    } else {
        check(debut_chain_apply(chain, debut_tensor_data(x), n, debut_tensor_data_mut(out), threads, macs));
    }
    return y;
}

int cmd_apply(const ApplyArgs& a) {
    const auto chain = load_chain(a.chain);
    if (!debut_chain_has_values(chain.get())) {
        throw Failure(kExitValidation, "MissingValues: '" + a.chain + "' has no factor values (see `debut init`)");
    }
    debut_dtype in_dtype = DEBUT_F64;
    const auto x = load_tensor(a.input, &in_dtype);
    const size_t rank = debut_tensor_rank(x.get());

    debut_layer layer{};
    std::string layer_name = "layer";
    const bool conv = rank == 3;
    if (conv) {
        if (!a.layer.empty()) {
            layer = parse_layer(a.layer, layer_name);
        } else if (!debut_chain_get_layer(chain.get(), &layer)) {
            throw Failure(kExitUsage, "the chain file has no layer metadata; pass --layer k,Ci,Co");
        }
    } else if (rank != 2) {
        throw Failure(kExitValidation, "ShapeMismatch: input must be a matrix or an H x W x C feature map");
    }

    auto run = [&](const std::string& mode, uint64_t* macs) {
        if (!conv) return apply_matrix(chain.get(), x.get(), mode, a.threads, macs);
        debut_tensor* out = nullptr;
        check(debut_conv_apply(chain.get(), x.get(), &layer, a.stride, a.pad, parse_mode(mode), &out, macs));
        return TensorPtr(out);
    };

    uint64_t macs = 0;
    const auto y = run(a.mode, &macs);
    const size_t* d = debut_tensor_dims(y.get());
    std::printf("%s output:", a.mode.c_str());
    for (size_t i = 0; i < debut_tensor_rank(y.get()); ++i) std::printf("%s%zu", i ? "x" : " ", d[i]);
    if (macs) std::printf(", chain macs=%llu", static_cast<unsigned long long>(macs));
    std::printf("\n");

    if (a.verify) {
        const double tol = in_dtype == DEBUT_F32 ? 1e-9 : 1e-12;
        double worst = 0.0, scale = 0.0;
        const double* yd = debut_tensor_data(y.get());
        for (size_t i = 0; i < debut_tensor_size(y.get()); ++i) scale = std::max(scale, std::abs(yd[i]));
        for (const char* m : {"chain", "dsc", "dense"}) {
            if (!conv && std::string(m) == "dsc") continue;
            const auto other = run(m, nullptr);
            double diff = 0.0;
            check(debut_tensor_max_abs_diff(y.get(), other.get(), &diff));
            worst = std::max(worst, diff);
        }
        const double rel = scale > 0.0 ? worst / scale : worst;
        std::printf("max path divergence %.3e (relative to max |y|), tolerance %.0e: %s\n", rel, tol,
                    rel < tol ? "ok" : "FAILED");
        if (rel >= tol) return kExitNumerical;
    }
    if (!a.out.empty()) check(debut_tensor_save(y.get(), a.out.c_str(), parse_dtype(a.dtype)));
    return kExitOk;
}

// fit

struct FitArgs {
    std::string structure;
    std::string target;
    size_t sweeps = 50;
    double tol = -1.0;
    double ridge = 0.0;
    uint64_t seed = 0;
    std::string out;
    std::string trace;
};

int cmd_fit(const FitArgs& a) {
    const auto structure = load_chain(a.structure);
    const auto target = load_tensor(a.target);
    debut_fit_options opts;
    debut_fit_options_default(&opts);
    opts.max_sweeps = a.sweeps;
    if (a.tol >= 0.0) opts.rel_tol = a.tol;
    opts.ridge = a.ridge;
    opts.seed = a.seed;
    debut_chain* fitted = nullptr;
    debut_fit_report* raw = nullptr;
    const auto t0 = Clock::now();
    check(debut_als_fit(structure.get(), target.get(), &opts, &fitted, &raw));
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    ChainPtr chain(fitted);
    FitPtr rep(raw);

    std::string csv = "sweep,factor,error\n";
    char line[96];
    for (size_t i = 0; i < debut_fit_report_trace_length(rep.get()); ++i) {
        size_t sweep = 0, factor = 0;
        double err = 0.0;
        check(debut_fit_report_trace_step(rep.get(), i, &sweep, &factor, &err));
        std::snprintf(line, sizeof line, "%zu,%zu,%.17g\n", sweep, factor, err);
        csv += line;
    }
    std::printf("initial error %.3e, final error %.3e after %zu sweeps (%.2f s)\n",
                debut_fit_report_initial_error(rep.get()), debut_fit_report_final_error(rep.get()),
                debut_fit_report_sweeps(rep.get()), secs);
    if (!a.trace.empty()) {
        write_file(a.trace, csv);
    } else {
        std::fputs(csv.c_str(), stdout);
    }
    if (!a.out.empty()) check(debut_chain_save(chain.get(), a.out.c_str(), 1));
    return kExitOk;
}

// bench

struct BenchArgs {
    std::string chain;
    size_t cols = 1000;
    size_t repeat = 10;
    unsigned threads = 1;
    uint64_t seed = 0;
    std::string csv;
};

int cmd_bench(const BenchArgs& a) {
    if (a.cols == 0 || a.repeat == 0) throw Failure(kExitUsage, "--cols and --repeat must be positive");
    auto chain = load_chain(a.chain);
    if (!debut_chain_has_values(chain.get())) {
        debut_chain* filled = nullptr;
        check(debut_chain_random_init(chain.get(), a.seed, "uniform-fanin", &filled));
        chain.reset(filled);
    }
    size_t rows = 0, cols = 0;
    debut_chain_shape(chain.get(), &rows, &cols);
    const size_t in_dims[] = {cols, a.cols};
    debut_tensor* raw = nullptr;
    check(debut_tensor_random(in_dims, 2, a.seed + 1, &raw));
    TensorPtr x(raw);

    std::vector<double> out_chain(rows * a.cols), out_dense(rows * a.cols), dense(rows * cols);
    check(debut_chain_expand(chain.get(), dense.data()));

    uint64_t macs = 0;
    double best_chain = 1e300, best_dense = 1e300;
    for (size_t r = 0; r < a.repeat; ++r) {
        auto t0 = Clock::now();
        check(debut_chain_apply(chain.get(), debut_tensor_data(x.get()), a.cols, out_chain.data(), a.threads, &macs));
        best_chain = std::min(best_chain, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
        t0 = Clock::now();
        check(debut_dense_matmul(dense.data(), rows, cols, debut_tensor_data(x.get()), a.cols, out_dense.data()));
        best_dense = std::min(best_dense, std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    }
    double diff = 0.0, scale = 0.0;
    for (size_t i = 0; i < out_chain.size(); ++i) {
        diff = std::max(diff, std::abs(out_chain[i] - out_dense[i]));
        scale = std::max(scale, std::abs(out_dense[i]));
    }
    const double rel = scale > 0.0 ? diff / scale : diff;

    debut_chain_stats st{};
    check(debut_chain_stats_get(chain.get(), 0, &st));
    const uint64_t dense_macs = static_cast<uint64_t>(rows) * cols;
    const double ratio = static_cast<double>(dense_macs) / static_cast<double>(st.macs_per_column);
    std::printf("chain %zux%zu, %zu factors, %zu cols, %zu repeats, %u thread(s)\n", rows, cols,
                debut_chain_num_factors(chain.get()), a.cols, a.repeat, a.threads);
    std::printf("macs/col: chain %llu vs dense %llu, ratio %.2fx (measured %llu total)\n",
                static_cast<unsigned long long>(st.macs_per_column), static_cast<unsigned long long>(dense_macs), ratio,
                static_cast<unsigned long long>(macs));
    std::printf("best wall time: chain %.3f ms, dense GEMM %.3f ms, speedup %.2fx\n", best_chain, best_dense,
                best_dense / best_chain);
    std::printf("chain vs dense output: max rel diff %.3e\n", rel);
    if (!a.csv.empty()) {
        char line[256];
        std::snprintf(line, sizeof line, "%zu,%zu,%zu,%zu,%u,%llu,%llu,%.6f,%.6f,%.6f,%.3e\n", rows, cols, a.cols,
                      a.repeat, a.threads, static_cast<unsigned long long>(st.macs_per_column),
                      static_cast<unsigned long long>(dense_macs), ratio, best_chain, best_dense, rel);
        write_file(a.csv,
                   std::string("rows,cols,batch,repeat,threads,chain_macs_per_col,dense_macs_per_col,mac_ratio,"
                               "chain_ms,dense_ms,max_rel_diff\n") +
                       line);
    }
    return rel < 1e-9 ? kExitOk : kExitNumerical;
}

// helpers

int cmd_init(const std::string& structure, uint64_t seed, const std::string& scheme, const std::string& out) {
    const auto chain = load_chain(structure);
    debut_chain* filled = nullptr;
    check(debut_chain_random_init(chain.get(), seed, scheme.c_str(), &filled));
    ChainPtr c(filled);
    check(debut_chain_save(c.get(), out.c_str(), 1));
    std::printf("wrote %s (%s, seed %llu)\n", out.c_str(), scheme.c_str(), static_cast<unsigned long long>(seed));
    return kExitOk;
}

int cmd_make_tensor(const std::string& dims_text, uint64_t seed, bool zeros, const std::string& dtype,
                    const std::string& out) {
    const auto dims = parse_size_list(dims_text, "--dims");
    debut_tensor* raw = nullptr;
    if (zeros) {
        check(debut_tensor_create(dims.data(), dims.size(), nullptr, &raw));
    } else {
        check(debut_tensor_random(dims.data(), dims.size(), seed, &raw));
    }
    TensorPtr t(raw);
    check(debut_tensor_save(t.get(), out.c_str(), parse_dtype(dtype)));
    std::printf("wrote %s (%zu elements)\n", out.c_str(), debut_tensor_size(t.get()));
    return kExitOk;
}

int cmd_expand(const std::string& chain_path, const std::string& out) {
    const auto chain = load_chain(chain_path);
    size_t rows = 0, cols = 0;
    debut_chain_shape(chain.get(), &rows, &cols);
    const size_t dims[] = {rows, cols};
    debut_tensor* raw = nullptr;
    check(debut_tensor_create(dims, 2, nullptr, &raw));
    TensorPtr t(raw);
    check(debut_chain_expand(chain.get(), debut_tensor_data_mut(t.get())));
    check(debut_tensor_save(t.get(), out.c_str(), DEBUT_F64));
    std::printf("wrote %s (%zux%zu)\n", out.c_str(), rows, cols);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deformable butterfly chains: generate, validate, apply, fit and benchmark"};
    app.set_version_flag("--version", std::string(debut_version()));
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Generate a chain for one layer or a whole model");
    auto* g_layer = g->add_option("--layer", gen.layer, "k,Ci,Co[,Ho,Wo]");
    auto* g_model = g->add_option("--model", gen.model, "Model spec JSON file")->check(CLI::ExistingFile);
    g_layer->excludes(g_model);
    g->add_option("--name", gen.name, "Layer name for --layer");
    g->add_option("--kind", gen.kind, "mono or bulging")->check(CLI::IsMember({"mono", "bulging"}));
    g->add_option("--N", gen.n, "Shrinking level (default 3)")->check(CLI::PositiveNumber);
    g->add_option("--alpha", gen.alpha, "Bulging rate, e.g. 3/2");
    g->add_option("--pool", gen.pool, "default, extended, or a JSON file of [r, s] pairs");
    g->add_flag("--strict-pot", gen.strict_pot, "Reject non power-of-two channel counts");
    g->add_option("--out", gen.out, "Write the chain spec (or model report) JSON here");
    g->add_option("--sweep-N", gen.sweep_n, "With --model: totals for each N in FROM:TO (CSV with --out)");

    std::string validate_path;
    auto* v = app.add_subcommand("validate", "Validate a chain spec file and print its statistics");
    v->add_option("file", validate_path, "Chain spec JSON")->required();

    ApplyArgs ap;
    auto* a = app.add_subcommand("apply", "Apply a chain to a tensor file");
    a->add_option("--chain", ap.chain, "Chain spec with values")->required();
    a->add_option("--input", ap.input, "Input tensor (H x W x C feature map or matrix)")->required();
    a->add_option("--layer", ap.layer, "k,Ci,Co when the chain file has no layer metadata");
    a->add_option("--stride", ap.stride, "Convolution stride")->check(CLI::PositiveNumber);
    a->add_option("--pad", ap.pad, "Zero padding");
    a->add_option("--mode", ap.mode, "chain, dsc or dense")->check(CLI::IsMember({"chain", "dsc", "dense"}));
    a->add_option("--out", ap.out, "Output tensor file");
    a->add_option("--dtype", ap.dtype, "Output dtype")->check(CLI::IsMember({"f32", "f64"}));
    a->add_flag("--verify", ap.verify, "Run every execution path and report the largest divergence");
    a->add_option("--threads", ap.threads, "Worker threads for matrix inputs")->check(CLI::PositiveNumber);

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "Fit chain values to a dense target by alternating least squares");
    f->add_option("--structure", fit.structure, "Chain spec (values are ignored)")->required();
    f->add_option("--target", fit.target, "Target matrix tensor file")->required();
    f->add_option("--sweeps", fit.sweeps, "Maximum sweeps")->check(CLI::PositiveNumber);
    f->add_option("--tol", fit.tol, "Stop when a sweep improves the error by less than tol * error");
    f->add_option("--ridge", fit.ridge, "Relative Tikhonov damping (0 = exact solves)");
    f->add_option("--seed", fit.seed, "Initialization seed");
    f->add_option("--out", fit.out, "Fitted chain spec");
    f->add_option("--trace", fit.trace, "Error trace CSV (stdout when omitted)");

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Compare chain application against a dense GEMM");
    b->add_option("--chain", bench.chain, "Chain spec")->required();
    b->add_option("--cols", bench.cols, "Input columns");
    b->add_option("--repeat", bench.repeat, "Repetitions (best time is reported)");
    b->add_option("--threads", bench.threads, "Worker threads for the chain path")->check(CLI::PositiveNumber);
    b->add_option("--seed", bench.seed, "Seed for input and missing values");
    b->add_option("--csv", bench.csv, "Write a one-row CSV table here");

    std::string init_structure, init_scheme = "uniform-fanin", init_out;
    uint64_t init_seed = 0;
    auto* in = app.add_subcommand("init", "Fill a chain structure with random values");
    in->add_option("--structure", init_structure, "Chain spec")->required();
    in->add_option("--seed", init_seed, "Seed");
    in->add_option("--scheme", init_scheme, "zeros, ones, uniform-fanin or normal-fanin");
    in->add_option("--out", init_out, "Output chain spec")->required();

    std::string mt_dims, mt_dtype = "f64", mt_out;
    uint64_t mt_seed = 0;
    bool mt_zeros = false;
    auto* mt = app.add_subcommand("make-tensor", "Write a random (or zero) tensor file");
    mt->add_option("--dims", mt_dims, "Comma-separated dims, e.g. 8,8,3")->required();
    mt->add_option("--seed", mt_seed, "Seed");
    mt->add_flag("--zeros", mt_zeros, "All zeros instead of uniform [-1, 1)");
    mt->add_option("--dtype", mt_dtype, "f32 or f64")->check(CLI::IsMember({"f32", "f64"}));
    mt->add_option("--out", mt_out, "Output file")->required();

    std::string ex_chain, ex_out;
    auto* ex = app.add_subcommand("expand", "Write the dense product of a chain as a matrix tensor");
    ex->add_option("--chain", ex_chain, "Chain spec with values")->required();
    ex->add_option("--out", ex_out, "Output tensor file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (g->parsed()) {
            if (gen.layer.empty() == gen.model.empty()) throw Failure(kExitUsage, "generate needs --layer or --model");
            return gen.model.empty() ? cmd_generate_layer(gen) : cmd_generate_model(gen);
        }
        if (v->parsed()) return cmd_validate(validate_path);
        if (a->parsed()) return cmd_apply(ap);
        if (f->parsed()) return cmd_fit(fit);
        if (b->parsed()) return cmd_bench(bench);
        if (in->parsed()) return cmd_init(init_structure, init_seed, init_scheme, init_out);
        if (mt->parsed()) return cmd_make_tensor(mt_dims, mt_seed, mt_zeros, mt_dtype, mt_out);
        if (ex->parsed()) return cmd_expand(ex_chain, ex_out);
    } catch (const Failure& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code;
    }
    return kExitUsage;
}
