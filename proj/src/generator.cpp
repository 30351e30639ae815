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

#include "debut/generator.hpp"

#include <bit>
#include <charconv>
#include <numeric>

namespace debut {

namespace {

bool is_pot(std::size_t c) { return c != 0 && (c & (c - 1)) == 0; }

std::uint64_t parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::ParseError, "not an unsigned integer: '" + std::string(s) + "'");
    }
    return v;
}

Rational reduced(std::uint64_t num, std::uint64_t den) {
    if (num == 0 || den == 0) throw Error(ErrorCode::InvalidArgument, "rational must be positive");
    const auto g = std::gcd(num, den);
    return Rational{num / g, den / g};
}

}  // namespace

std::string_view gen_kind_name(GenKind kind) noexcept {
    return kind == GenKind::Mono ? "mono" : "bulging";
}

GenKind parse_gen_kind(std::string_view name) {
    if (name == "mono" || name == "monotonic") return GenKind::Mono;
    if (name == "bulging") return GenKind::Bulging;
    throw Error(ErrorCode::InvalidArgument, "unknown chain kind '" + std::string(name) + "'");
}

Rational Rational::parse(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        return reduced(parse_u64(text.substr(0, slash)), parse_u64(text.substr(slash + 1)));
    }
    // Decimal: "1.5" -> 15/10.
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) return reduced(parse_u64(text), 1);
    const auto frac = text.substr(dot + 1);
    if (frac.size() > 12) throw Error(ErrorCode::ParseError, "too many decimals in '" + std::string(text) + "'");
    std::uint64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const auto whole = dot == 0 ? 0 : parse_u64(text.substr(0, dot));
    const auto part = frac.empty() ? 0 : parse_u64(frac);
    return reduced(whole * den + part, den);
}

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

Pool default_pool() { return {{2, 4}, {4, 8}, {2, 2}, {4, 4}, {8, 16}}; }

Pool extended_pool() {
    auto pool = default_pool();
    pool.emplace_back(1, 2);
    pool.emplace_back(1, 1);
    return pool;
}

std::vector<FactorSignature> GeneratorPlan::signatures() const {
    std::vector<FactorSignature> sigs;
    sigs.reserve(sup.size());
    for (std::size_t i = 0; i < sup.size(); ++i)
        sigs.push_back({sup[i].first, sup[i].second, sub[i][0], sub[i][1], sub[i][2]});
    return sigs;
}

DeButChain GeneratorPlan::structure() const { return make_structure(signatures()); }

std::size_t round_pot(std::size_t c) {
    if (c <= 1) return 1;
    return std::bit_ceil(c);
}

namespace {

struct Geometry {
    std::size_t k;
    std::size_t ci;  // padded
    std::size_t co;  // padded
    int ratio_log;   // log2(co / ci) in {-1, 0, 1}
};

Geometry check_geometry(const LayerSpec& layer, const GeneratorConfig& cfg) {
    if (layer.k != 1 && layer.k != 3 && layer.k != 5 && layer.k != 7) {
        throw Error(ErrorCode::InvalidArgument,
                    "generation supports k in {1,3,5,7}, got k=" + std::to_string(layer.k));
    }
    if (layer.c_in == 0 || layer.c_out == 0) {
        throw Error(ErrorCode::InvalidArgument, "channel counts must be positive");
    }
    if (cfg.strict_pot && (!is_pot(layer.c_in) || !is_pot(layer.c_out))) {
        throw Error(ErrorCode::InvalidArgument,
                    "strict power-of-two mode: C_i=" + std::to_string(layer.c_in) +
                        ", C_o=" + std::to_string(layer.c_out));
    }
    Geometry g{layer.k, round_pot(layer.c_in), round_pot(layer.c_out), 0};
    if (g.co == g.ci) {
        g.ratio_log = 0;
    } else if (g.co * 2 == g.ci) {
        g.ratio_log = -1;
    } else if (g.co == g.ci * 2) {
        g.ratio_log = 1;
    } else {
        throw Error(ErrorCode::UnsupportedRatio,
                    "padded channel ratio " + std::to_string(g.co) + "/" + std::to_string(g.ci) +
                        " is not one of 1, 1/2, 2");
    }
    return g;
}

}  // namespace

std::vector<FactorShape> plan_superscripts(const LayerSpec& layer, const GeneratorConfig& cfg) {
    if (cfg.shrink_level == 0) throw Error(ErrorCode::InvalidArgument, "shrinking level must be >= 1");
    const Geometry g = check_geometry(layer, cfg);

    const long n3 = static_cast<long>(g.k) - 1 - g.ratio_log;
    if (n3 < 0) {
        throw Error(ErrorCode::InfeasibleStage3,
                    "stage 3 would need " + std::to_string(n3) + " halving factors (k=" +
                        std::to_string(g.k) + ", C_o/C_i=" + (g.ratio_log > 0 ? "2" : "1/2") + ")");
    }

    const std::size_t height = (std::size_t{1} << g.k) * g.ci;  // 2^(k + log2 C_i)
    const std::size_t width = g.ci * g.k * g.k;
    const long n = static_cast<long>(cfg.shrink_level);

    std::vector<FactorShape> sup;
    long n2 = 0;
    if (cfg.kind == GenKind::Mono) {
        sup.emplace_back(height, width);
        n2 = std::max(0L, n - (g.ratio_log > 0 ? 3 : 5));
    } else {
        const auto& a = cfg.alpha;
        if ((height * a.num) % a.den != 0) {
            throw Error(ErrorCode::NonIntegerBulge,
                        "bulging height " + std::to_string(height) + "*" + a.str() + " is not an integer");
        }
        const std::size_t bulge = height * a.num / a.den;
        sup.emplace_back(bulge, width);
        sup.emplace_back(height, bulge);
        n2 = std::max(0L, n - (g.ratio_log > 0 ? 4 : 6));
    }
    for (long i = 0; i < n2; ++i) sup.emplace_back(height, height);
    for (long j = 0; j < n3; ++j) sup.emplace_back(height >> (j + 1), height >> j);
    sup.emplace_back(g.co, 2 * g.co);
    return sup;
}

GeneratorPlan assign_subscripts(const std::vector<FactorShape>& sup, const LayerSpec& layer,
                                const GeneratorConfig& cfg) {
    if (sup.empty()) throw Error(ErrorCode::InvalidArgument, "empty superscript list");
    for (std::size_t i = 1; i < sup.size(); ++i) {
        if (sup[i].second != sup[i - 1].first) {
            throw Error(ErrorCode::ShapeChainBreak, "superscripts do not telescope", i + 1);
        }
    }

    GeneratorPlan plan;
    plan.layer = layer;
    plan.requested = cfg.kind;
    plan.sup = sup;
    plan.c_in_padded = round_pot(layer.c_in);
    plan.c_out_padded = round_pot(layer.c_out);

    const std::size_t k = layer.k;
    const std::size_t out_height = sup.back().first;
    std::size_t t = 1;
    std::size_t next = 0;

    auto push = [&](std::size_t r, std::size_t s) {
        plan.sub.push_back({r, s, t});
        t *= r;
        ++next;
    };

    // Stage 1.
    if (cfg.kind == GenKind::Mono) {
        push(std::size_t{1} << k, k * k);
    } else {
        const auto& a = cfg.alpha;
        if ((k * k * a.den) % a.num != 0) {
            throw Error(ErrorCode::NonIntegerBulge,
                        "k^2/alpha = " + std::to_string(k * k) + "/" + a.str() + " is not an integer");
        }
        const std::size_t r1 = std::size_t{1} << k;
        const std::size_t s1 = k * k * a.den / a.num;
        const FactorSignature first{sup[0].first, sup[0].second, r1, s1, 1};
        if (!first.is_valid()) {
            throw Error(ErrorCode::NonIntegerBulge,
                        "bulging rate " + a.str() + " leaves a fractional block count in factor 1", 1);
        }
        push(r1, s1);
    }

    auto fits = [&](std::size_t idx, std::size_t r, std::size_t s) {
        const auto [p, q] = sup[idx];
        return s * p == r * q && p % (r * t) == 0 && out_height % (r * t) == 0;
    };

    // Second bulging factor: pool entry with aspect alpha, or alpha in lowest terms.
    if (cfg.kind == GenKind::Bulging && sup.size() > 2) {
        bool found = false;
        for (const auto& [r, s] : cfg.pool) {
            ++plan.pool_probes;
            if (fits(next, r, s)) {
                push(r, s);
                found = true;
                break;
            }
        }
        if (!found) {
            const auto r = static_cast<std::size_t>(cfg.alpha.den);
            const auto s = static_cast<std::size_t>(cfg.alpha.num);
            if (!fits(next, r, s)) {
                throw Error(ErrorCode::PoolExhausted,
                            "no block shape fits bulging factor " + std::to_string(next + 1), next + 1);
            }
            push(r, s);
        }
    }

    // Stages 2 and 3.
    while (next + 1 < sup.size()) {
        bool found = false;
        for (const auto& [r, s] : cfg.pool) {
            ++plan.pool_probes;
            if (fits(next, r, s)) {
                push(r, s);
                found = true;
                break;
            }
        }
        if (!found) {
            throw Error(ErrorCode::PoolExhausted,
                        "no pool entry fits factor " + std::to_string(next + 1) + " (" +
                            std::to_string(sup[next].first) + "x" + std::to_string(sup[next].second) +
                            ", t=" + std::to_string(t) + ")",
                        next + 1);
        }
    }

    // Stage 4: forced by the single-block condition.
    if (next < sup.size()) {
        const auto [p, q] = sup[next];
        if (p % t != 0 || q % t != 0) {
            throw Error(ErrorCode::FinalFactorInfeasible,
                        "t=" + std::to_string(t) + " does not divide the final factor " +
                            std::to_string(p) + "x" + std::to_string(q),
                        next + 1);
        }
        push(p / t, q / t);
    }

    const auto sigs = plan.signatures();
    plan.validated = validate_signatures(sigs).kind;
    for (const auto& sig : sigs) plan.nnz += sig.nnz();
    const auto dense = layer.dense_params();
    plan.eta = 1.0 - static_cast<double>(plan.nnz) / static_cast<double>(dense);
    return plan;
}

GeneratorPlan generate_chain(const LayerSpec& layer, const GeneratorConfig& cfg) {
    return assign_subscripts(plan_superscripts(layer, cfg), layer, cfg);
}

GeneratorConfig apply_overrides(const GeneratorConfig& base, const LayerOverrides& o) {
    GeneratorConfig cfg = base;
    if (o.shrink_level) cfg.shrink_level = *o.shrink_level;
    if (o.kind) cfg.kind = *o.kind;
    if (o.alpha) cfg.alpha = *o.alpha;
    if (o.pool) cfg.pool = *o.pool;
    return cfg;
}

ModelReport generate_model(const ModelSpec& model, const GeneratorConfig& cfg) {
    if (model.layers.empty()) throw Error(ErrorCode::InvalidArgument, "model has no layers");
    ModelReport report;
    for (const auto& ml : model.layers) {
        LayerReport lr;
        lr.name = ml.layer.name;
        lr.keep_dense = ml.keep_dense;
        lr.dense_params = ml.layer.dense_params();
        if (ml.keep_dense) {
            lr.params = lr.dense_params;
        } else {
            try {
                lr.plan = generate_chain(ml.layer, apply_overrides(cfg, ml.overrides));
            } catch (const Error& e) {
                throw Error(e.code(), "layer '" + ml.layer.name + "': " + e.what(), e.factor_index());
            }
            lr.params = lr.plan->nnz;
        }
        report.total_params += lr.params;
        report.dense_params += lr.dense_params;
        report.layers.push_back(std::move(lr));
    }
    report.mc = 1.0 - static_cast<double>(report.total_params) / static_cast<double>(report.dense_params);
    return report;
}

}  // namespace debut
