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

#include <algorithm>

#include "debut/chain.hpp"
#include "oracles.hpp"

using namespace debut;

namespace {

const std::vector<FactorSignature> kSmall{{18, 27, 2, 3, 1}, {6, 18, 1, 3, 2}, {6, 6, 3, 3, 2}};

Error error_of(const std::vector<FactorSignature>& sigs) {
    try {
        validate_signatures(sigs);
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "validation passed unexpectedly";
    return Error(ErrorCode::InvalidArgument, "");
}

}  // namespace

TEST(Chain, SmallExampleIsMonotonic) {
    const auto c = make_structure(kSmall);
    EXPECT_EQ(c.kind(), ChainKind::Monotonic);
    EXPECT_EQ(c.rows(), 6u);
    EXPECT_EQ(c.cols(), 27u);
    EXPECT_FALSE(c.expanding_bulge());
}

TEST(Chain, BulgingExample) {
    const auto v = validate_signatures({{16, 8, 2, 1, 1}, {8, 16, 4, 8, 2}});
    EXPECT_EQ(v.kind, ChainKind::Bulging);
    EXPECT_FALSE(v.expanding_bulge);
}

TEST(Chain, ExpandingBulgeIsFlagged) {
    // 4 -> 2 -> 4 -> 8: overall expanding with a shrinking first factor.
    const std::vector<FactorSignature> sigs{{2, 4, 1, 2, 1}, {4, 2, 2, 1, 1}, {8, 4, 4, 2, 2}};
    const auto v = validate_signatures(sigs);
    EXPECT_EQ(v.kind, ChainKind::Bulging);
    EXPECT_TRUE(v.expanding_bulge);
}

TEST(Chain, BrokenRecursionsNameTheFactor) {
    const auto e = error_of({{18, 27, 2, 3, 1}, {6, 18, 1, 3, 1}});
    EXPECT_EQ(e.code(), ErrorCode::TRecursionBreak);
    EXPECT_EQ(e.factor_index(), 2u);

    const auto e2 = error_of({{18, 27, 2, 3, 1}, {6, 12, 1, 2, 2}});
    EXPECT_EQ(e2.code(), ErrorCode::ShapeChainBreak);
    EXPECT_EQ(e2.factor_index(), 2u);

    const auto e3 = error_of({{18, 27, 2, 3, 1}, {6, 18, 1, 3, 2}});
    EXPECT_EQ(e3.code(), ErrorCode::TRecursionBreak);
    EXPECT_EQ(e3.factor_index(), 2u);

    const auto e4 = error_of({{12, 18, 2, 3, 2}});
    EXPECT_EQ(e4.code(), ErrorCode::TRecursionBreak);
    EXPECT_EQ(e4.factor_index(), 1u);
}

TEST(Chain, ReversalBreaksValidation) {
    auto rev = kSmall;
    std::reverse(rev.begin(), rev.end());
    EXPECT_THROW(validate_signatures(rev), Error);
}

TEST(Chain, StatsOfSmallExample) {
    const auto st = chain_stats(make_structure(kSmall));
    EXPECT_EQ(st.nnz_total, 90u);
    EXPECT_EQ(st.macs_per_column, 90u);
    EXPECT_EQ(st.macs_bound, 54u);
    EXPECT_EQ(st.dense_params, 162u);
    EXPECT_DOUBLE_EQ(st.compression_ratio, 1.0 - 90.0 / 162.0);
}

TEST(Chain, StatsOfGeneratedShape) {
    const auto c = make_structure({{512, 576, 8, 9, 1}, {256, 512, 2, 4, 8}, {128, 256, 2, 4, 16}, {64, 128, 2, 4, 32}});
    const auto st = chain_stats(c);
    EXPECT_EQ(st.nnz_total, 6400u);
    EXPECT_EQ(st.dense_params, 36864u);
    EXPECT_NEAR(st.compression_ratio, 0.8264, 1e-4);
    LayerSpec layer{"l", 3, 64, 64, 0, 0};
    EXPECT_EQ(chain_stats(c, &layer).dense_params, 36864u);
}

TEST(Chain, DenseEquivalentFactorHasZeroCompression) {
    const auto st = chain_stats(make_structure({{6, 9, 6, 9, 1}}));
    EXPECT_EQ(st.compression_ratio, 0.0);
}

TEST(Chain, NegativeCompressionIsReported) {
    const auto st = chain_stats(make_structure({{16, 8, 2, 1, 1}, {8, 16, 4, 8, 2}}));
    EXPECT_EQ(st.nnz_total, 16u + 64u);
    EXPECT_LT(st.compression_ratio, 0.0);
}

TEST(Chain, AllOnesSmallExampleOracleValue) {
    const auto c = random_init(make_structure(kSmall), 0, InitScheme::Ones);
    const Matrix out = apply_chain(c, Matrix::Ones(27, 1));
    for (Eigen::Index i = 0; i < 6; ++i) EXPECT_EQ(out(i, 0), 27.0);
    EXPECT_EQ(expand_chain(c), Matrix::Ones(6, 27));
}

TEST(Chain, ApplyMatchesDenseOracle) {
    std::mt19937_64 rng(7);
    const auto c = random_init(make_structure(kSmall), 42);
    const Matrix m = oracle::random_matrix(rng, 27, 4);
    EXPECT_LE(oracle::rel_diff(apply_chain(c, m), oracle::dense_chain(c) * m), 1e-12);
    EXPECT_LE(oracle::rel_diff(expand_chain(c), oracle::dense_chain(c)), 1e-12);
}

TEST(Chain, RandomStructuresApplyAndCountMacs) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 60; ++trial) {
        const auto sigs = oracle::random_structure(rng, 5, 3);
        const auto c = random_init(make_structure(sigs), static_cast<std::uint64_t>(trial));
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 5);
        const Matrix m = oracle::random_matrix(rng, c.cols(), n);
        std::uint64_t macs = 0;
        const Matrix got = apply_chain(c, m, &macs);
        ASSERT_LE(oracle::rel_diff(got, oracle::dense_chain(c) * m), 1e-12);
        std::uint64_t expect = 0;
        for (const auto& s : sigs) expect += s.p * s.s;
        ASSERT_EQ(macs, expect * n);
        ASSERT_EQ(chain_stats(c).macs_per_column, expect);
    }
}

TEST(Chain, ThreadedApplyIsBitwiseIdentical) {
    std::mt19937_64 rng(23);
    const auto c = random_init(make_structure(kSmall), 3);
    const Matrix m = oracle::random_matrix(rng, 27, 37);
    std::uint64_t macs1 = 0, macs4 = 0;
    const Matrix a = apply_chain(c, m, &macs1, 1);
    const Matrix b = apply_chain(c, m, &macs4, 4);
    EXPECT_EQ(a, b);
    EXPECT_EQ(macs1, macs4);
}

TEST(Chain, FullSupportOnRandomStructures) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
        const auto sigs = oracle::random_structure(rng, 4, 4);
        const auto c = random_init(make_structure(sigs), 0, InitScheme::Ones);
        const Matrix e = expand_chain(c);
        ASSERT_GT(e.minCoeff(), 0.0);
        ASSERT_EQ(e, Matrix::Ones(e.rows(), e.cols())) << "each entry has exactly one path";
    }
}

TEST(Chain, InitSchemes) {
    const auto s = make_structure(kSmall);
    const auto z = random_init(s, 1, "zeros");
    for (const auto& f : z.factors())
        EXPECT_TRUE(std::all_of(f.values().begin(), f.values().end(), [](double v) { return v == 0.0; }));
    const auto a = random_init(s, 9, "uniform-fanin");
    const auto b = random_init(s, 9, "uniform-fanin");
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(a[i].values(), b[i].values());
    EXPECT_NE(random_init(s, 10)[0].values(), a[0].values());
    try {
        random_init(s, 1, "glorot");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownScheme);
    }
}

TEST(Chain, FaninInitPreservesVariance) {
    const auto s = make_structure(kSmall);
    std::mt19937_64 rng(31);
    std::normal_distribution<double> nd(0.0, 1.0);
    double sum = 0.0, sumsq = 0.0;
    std::size_t count = 0;
    for (std::uint64_t trial = 0; trial < 1000; ++trial) {
        const auto c = random_init(s, trial);
        Matrix x(27, 1);
        for (Eigen::Index i = 0; i < 27; ++i) x(i, 0) = nd(rng);
        const Matrix y = apply_chain(c, x);
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            sum += y(i, 0);
            sumsq += y(i, 0) * y(i, 0);
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    const double var = sumsq / static_cast<double>(count) - mean * mean;
    EXPECT_GT(var, 1.0 / 3.0);
    EXPECT_LT(var, 3.0);
}

TEST(Chain, RowLayoutApplyMatchesColumnApply) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const auto c = random_init(make_structure(oracle::random_structure(rng, 4, 3)), static_cast<std::uint64_t>(trial));
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 9);
        const Matrix x = oracle::random_matrix(rng, c.cols(), n);
        const Matrix want = apply_chain(c, x);
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const RowMajor xr = x;
        for (unsigned threads : {1u, 3u}) {
            RowMajor got(static_cast<Eigen::Index>(c.rows()), static_cast<Eigen::Index>(n));
            std::uint64_t macs = 0;
            apply_chain_rows(c, xr.data(), got.data(), n, &macs, threads);
            ASSERT_LE((Matrix(got) - want).cwiseAbs().maxCoeff(), 1e-13 * (1.0 + want.cwiseAbs().maxCoeff()));
            std::uint64_t expect = 0;
            for (const auto& s : c.signatures()) expect += s.nnz();
            ASSERT_EQ(macs, expect * n);
        }
    }
}
