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

#include "debut/chain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

namespace debut {

std::string_view chain_kind_name(ChainKind kind) noexcept {
    return kind == ChainKind::Monotonic ? "Monotonic" : "Bulging";
}

ChainValidation validate_signatures(const std::vector<FactorSignature>& sigs) {
    if (sigs.empty()) throw Error(ErrorCode::InvalidArgument, "a chain needs at least one factor");

    for (std::size_t i = 0; i < sigs.size(); ++i) {
        if (!sigs[i].is_valid()) {
            throw Error(ErrorCode::InvalidSignature,
                        "factor " + std::to_string(i + 1) + " has an invalid signature", i + 1);
        }
    }
    for (std::size_t i = 1; i < sigs.size(); ++i) {
        if (sigs[i].q != sigs[i - 1].p) {
            throw Error(ErrorCode::ShapeChainBreak,
                        "factor " + std::to_string(i + 1) + " has q=" + std::to_string(sigs[i].q) +
                            " but the previous factor has p=" + std::to_string(sigs[i - 1].p),
                        i + 1);
        }
    }
    if (sigs.front().t != 1) {
        throw Error(ErrorCode::TRecursionBreak, "the rightmost factor must have t=1", 1);
    }
    for (std::size_t i = 1; i < sigs.size(); ++i) {
        const std::size_t expected = sigs[i - 1].r * sigs[i - 1].t;
        if (sigs[i].t != expected) {
            throw Error(ErrorCode::TRecursionBreak,
                        "factor " + std::to_string(i + 1) + " has t=" + std::to_string(sigs[i].t) +
                            ", expected r*t of the previous factor = " + std::to_string(expected),
                        i + 1);
        }
    }
    if (sigs.back().blocks() != 1) {
        throw Error(ErrorCode::TRecursionBreak,
                    "the leftmost factor must be a single diagonal block (p = r*t, q = s*t)",
                    sigs.size());
    }

    const std::size_t out_rows = sigs.back().p;
    const std::size_t in_cols = sigs.front().q;
    bool all_shrink = true;
    bool all_grow = true;
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        if (sigs[i].p > sigs[i].q) all_shrink = false;
        if (sigs[i].p < sigs[i].q) all_grow = false;
    }
    const bool monotonic = (out_rows <= in_cols && all_shrink) || (out_rows >= in_cols && all_grow);

    ChainValidation v;
    v.kind = monotonic ? ChainKind::Monotonic : ChainKind::Bulging;
    v.expanding_bulge = !monotonic && out_rows > in_cols;
    return v;
}

ChainValidation validate_chain(const std::vector<DeButFactor>& factors) {
    std::vector<FactorSignature> sigs;
    sigs.reserve(factors.size());
    for (const auto& f : factors) sigs.push_back(f.signature());
    return validate_signatures(sigs);
}

DeButChain::DeButChain(std::vector<DeButFactor> factors)
    : factors_(std::move(factors)), validation_(validate_chain(factors_)) {}

std::vector<FactorSignature> DeButChain::signatures() const {
    std::vector<FactorSignature> sigs;
    sigs.reserve(factors_.size());
    for (const auto& f : factors_) sigs.push_back(f.signature());
    return sigs;
}

DeButChain DeButChain::with_values(const std::vector<std::vector<double>>& values) const {
    if (values.size() != factors_.size()) {
        throw Error(ErrorCode::ValueLengthMismatch, "expected one value array per factor");
    }
    std::vector<DeButFactor> out;
    out.reserve(factors_.size());
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        try {
            out.push_back(factors_[i].with_values(values[i]));
        } catch (const Error& e) {
            throw Error(e.code(), e.what(), i + 1);
        }
    }
    return DeButChain(std::move(out));
}

DeButChain make_structure(const std::vector<FactorSignature>& sigs) {
    validate_signatures(sigs);
    std::vector<DeButFactor> factors;
    factors.reserve(sigs.size());
    for (const auto& sig : sigs) factors.emplace_back(sig);
    return DeButChain(std::move(factors));
}

ChainStats chain_stats(const DeButChain& c, const LayerSpec* layer) {
    ChainStats st;
    for (const auto& f : c.factors()) {
        const std::uint64_t nnz = f.signature().nnz();
        st.nnz_total += nnz;
        st.macs_bound = std::max(st.macs_bound, nnz);
    }
    st.macs_per_column = st.nnz_total;
    st.dense_params = layer ? layer->dense_params()
                            : static_cast<std::uint64_t>(c.rows()) * c.cols();
    st.compression_ratio = st.dense_params == 0
                               ? 0.0
                               : 1.0 - static_cast<double>(st.nnz_total) /
                                           static_cast<double>(st.dense_params);
    return st;
}

namespace {

Matrix apply_serial(const DeButChain& c, const Matrix& m, std::uint64_t* macs) {
    Matrix cur = apply_factor(c[0], m, macs);
    for (std::size_t i = 1; i < c.size(); ++i) cur = apply_factor(c[i], cur, macs);
    return cur;
}

}  // namespace

Matrix apply_chain(const DeButChain& c, const Matrix& m, std::uint64_t* macs, unsigned threads) {
    if (static_cast<std::size_t>(m.rows()) != c.cols()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "chain expects " + std::to_string(c.cols()) + " input rows, got " +
                        std::to_string(m.rows()));
    }
    const Eigen::Index n = m.cols();
    if (threads <= 1 || n < 2) return apply_serial(c, m, macs);

    const Eigen::Index workers = std::min<Eigen::Index>(threads, n);
    Matrix out(static_cast<Eigen::Index>(c.rows()), n);
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(workers), 0);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (Eigen::Index w = 0; w < workers; ++w) {
        const Eigen::Index begin = n * w / workers;
        const Eigen::Index end = n * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] {
            out.middleCols(begin, end - begin) =
                apply_serial(c, m.middleCols(begin, end - begin), &counts[static_cast<std::size_t>(w)]);
        });
    }
    for (auto& t : pool) t.join();
    if (macs)
        for (auto cnt : counts) *macs += cnt;
    return out;
}

void apply_chain_rows(const DeButChain& c, const double* in, double* out, std::size_t n, std::uint64_t* macs,
                      unsigned threads) {
    std::size_t widest = 0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) widest = std::max(widest, c[i].rows());

    // Columns are processed in tiles so the intermediates of one tile stay in cache.
    constexpr std::size_t kTile = 64;
    auto run = [&](std::size_t begin, std::size_t end) {
        std::vector<double> a(widest * kTile), b(widest * kTile);
        for (std::size_t t0 = begin; t0 < end; t0 += kTile) {
            const std::size_t w = std::min(kTile, end - t0);
            const double* src = in + t0;
            std::size_t ld_src = n;
            for (std::size_t i = 0; i < c.size(); ++i) {
                const bool last = i + 1 == c.size();
                double* dst = last ? out + t0 : a.data();
                apply_factor_rows(c[i], src, ld_src, dst, last ? n : w, w);
                src = dst;
                ld_src = w;
                std::swap(a, b);
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    if (workers == 1) {
        run(0, n);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, n * w / workers, n * (w + 1) / workers);
        for (auto& t : pool) t.join();
    }
    if (macs) {
        std::uint64_t per_col = 0;
        for (const auto& f : c.factors()) per_col += f.signature().nnz();
        *macs += per_col * n;
    }
}

Matrix expand_chain(const DeButChain& c) {
    Matrix prod = to_dense(c[0]);
    for (std::size_t i = 1; i < c.size(); ++i) prod = apply_factor(c[i], prod);
    return prod;
}

InitScheme parse_init_scheme(std::string_view name) {
    if (name == "zeros") return InitScheme::Zeros;
    if (name == "ones") return InitScheme::Ones;
    if (name == "uniform-fanin") return InitScheme::UniformFanin;
    if (name == "normal-fanin") return InitScheme::NormalFanin;
    throw Error(ErrorCode::UnknownScheme, "unknown init scheme '" + std::string(name) + "'");
}

std::string_view init_scheme_name(InitScheme scheme) noexcept {
    switch (scheme) {
        case InitScheme::Zeros: return "zeros";
        case InitScheme::Ones: return "ones";
        case InitScheme::UniformFanin: return "uniform-fanin";
        case InitScheme::NormalFanin: return "normal-fanin";
    }
    return "unknown";
}

DeButChain random_init(const DeButChain& c, std::uint64_t seed, InitScheme scheme) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> values;
    values.reserve(c.size());
    for (const auto& f : c.factors()) {
        const auto& sig = f.signature();
        std::vector<double> v(sig.nnz());
        const double fanin = static_cast<double>(sig.s);
        switch (scheme) {
            case InitScheme::Zeros: std::fill(v.begin(), v.end(), 0.0); break;
            case InitScheme::Ones: std::fill(v.begin(), v.end(), 1.0); break;
            case InitScheme::UniformFanin: {
                const double a = std::sqrt(3.0 / fanin);
                std::uniform_real_distribution<double> dist(-a, a);
                for (auto& x : v) x = dist(rng);
                break;
            }
            case InitScheme::NormalFanin: {
                std::normal_distribution<double> dist(0.0, std::sqrt(1.0 / fanin));
                for (auto& x : v) x = dist(rng);
                break;
            }
        }
        values.push_back(std::move(v));
    }
    return c.with_values(values);
}

DeButChain random_init(const DeButChain& c, std::uint64_t seed, std::string_view scheme) {
    return random_init(c, seed, parse_init_scheme(scheme));
}

}  // namespace debut
