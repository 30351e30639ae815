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

#include <functional>
#include <numeric>

#include "debut/factor.hpp"
#include "oracles.hpp"

using namespace debut;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InvalidArgument;
}

std::vector<FactorSignature> all_valid_small() {
    std::vector<FactorSignature> out;
    for (std::size_t p = 1; p <= 12; ++p)
        for (std::size_t q = 1; q <= 12; ++q)
            for (std::size_t r = 1; r <= p; ++r)
                for (std::size_t s = 1; s <= q; ++s)
                    for (std::size_t t = 1; t <= 4; ++t) {
                        FactorSignature sig{p, q, r, s, t};
                        if (sig.is_valid()) out.push_back(sig);
                    }
    return out;
}

}  // namespace

TEST(FactorSignature, ValidityRules) {
    EXPECT_TRUE((FactorSignature{18, 27, 2, 3, 1}).is_valid());
    EXPECT_EQ((FactorSignature{18, 27, 2, 3, 1}).blocks(), 9u);
    EXPECT_TRUE((FactorSignature{6, 18, 1, 3, 2}).is_valid());
    EXPECT_EQ((FactorSignature{6, 18, 1, 3, 2}).blocks(), 3u);
    EXPECT_FALSE((FactorSignature{6, 18, 2, 3, 1}).is_valid());
    EXPECT_FALSE((FactorSignature{0, 4, 1, 1, 1}).is_valid());
    EXPECT_FALSE((FactorSignature{4, 4, 3, 3, 1}).is_valid());
    EXPECT_EQ(code_of([] { FactorSignature{6, 18, 2, 3, 1}.check(); }), ErrorCode::InvalidSignature);
}

TEST(Factor, MakeFactorChecksLengths) {
    const FactorSignature sig{18, 27, 2, 3, 1};
    const auto f = make_factor(sig);
    EXPECT_EQ(f.values().size(), 54u);
    EXPECT_TRUE(std::all_of(f.values().begin(), f.values().end(), [](double v) { return v == 0.0; }));
    EXPECT_EQ(code_of([&] { make_factor(sig, std::vector<double>(53)); }), ErrorCode::ValueLengthMismatch);
    EXPECT_EQ(code_of([] { make_factor({6, 18, 2, 3, 1}); }), ErrorCode::InvalidSignature);
}

TEST(Factor, MaskSmallCases) {
    const std::vector<std::pair<std::size_t, std::size_t>> expect_1{{0, 0}, {0, 1}, {1, 0}, {1, 1},
                                                                    {2, 2}, {2, 3}, {3, 2}, {3, 3}};
    EXPECT_EQ(nonzero_mask({4, 4, 2, 2, 1}), expect_1);
    const std::vector<std::pair<std::size_t, std::size_t>> expect_2{{0, 0}, {0, 2}, {1, 1}, {1, 3},
                                                                    {2, 0}, {2, 2}, {3, 1}, {3, 3}};
    EXPECT_EQ(nonzero_mask({4, 4, 2, 2, 2}), expect_2);
    EXPECT_EQ(nonzero_mask({18, 27, 2, 3, 1}).size(), 54u);
}

TEST(Factor, MaskMatchesBruteForceForAllSmallSignatures) {
    const auto sigs = all_valid_small();
    ASSERT_GT(sigs.size(), 100u);
    for (const auto& sig : sigs) {
        const auto mask = nonzero_mask(sig);
        ASSERT_EQ(mask, oracle::brute_mask(sig)) << sig.p << "," << sig.q << "," << sig.r << "," << sig.s << "," << sig.t;
        ASSERT_EQ(mask.size(), sig.p * sig.s);
        ASSERT_EQ(mask.size(), sig.q * sig.r);
        std::vector<std::size_t> per_row(sig.p), per_col(sig.q);
        for (auto [i, j] : mask) {
            ++per_row[i];
            ++per_col[j];
        }
        for (auto n : per_row) ASSERT_EQ(n, sig.s);
        for (auto n : per_col) ASSERT_EQ(n, sig.r);
        for (std::size_t i = 0; i < sig.p; ++i) {
            const auto cols = row_columns(sig, i);
            ASSERT_EQ(cols.size(), sig.s);
            ASSERT_TRUE(std::is_sorted(cols.begin(), cols.end()));
        }
    }
}

TEST(Factor, ApplyOnesHandValue) {
    std::vector<double> v(8);
    std::iota(v.begin(), v.end(), 1.0);
    const auto f = make_factor({4, 4, 2, 2, 1}, v);
    const Matrix out = apply_factor(f, Matrix::Ones(4, 1));
    EXPECT_EQ(out(0, 0), 3.0);
    EXPECT_EQ(out(1, 0), 7.0);
    EXPECT_EQ(out(2, 0), 11.0);
    EXPECT_EQ(out(3, 0), 15.0);
}

TEST(Factor, IdentityPatternLeavesInputUnchanged) {
    std::mt19937_64 rng(3);
    for (std::size_t t : {1u, 2u, 3u, 6u}) {
        const auto f = make_factor({6, 6, 1, 1, t}, std::vector<double>(6, 1.0));
        const Matrix m = oracle::random_matrix(rng, 6, 4);
        EXPECT_EQ(apply_factor(f, m), m);
    }
}

TEST(Factor, ToDenseDiagonalAndRowSums) {
    const auto d = make_factor({2, 2, 1, 1, 2}, std::vector<double>{5.0, -2.0});
    const Matrix dense = to_dense(d);
    EXPECT_EQ(dense(0, 0), 5.0);
    EXPECT_EQ(dense(1, 1), -2.0);
    EXPECT_EQ(dense(0, 1), 0.0);
    EXPECT_EQ(dense(1, 0), 0.0);

    const auto ones = make_factor({18, 27, 2, 3, 1}, std::vector<double>(54, 1.0));
    const Matrix od = to_dense(ones);
    for (Eigen::Index i = 0; i < od.rows(); ++i) EXPECT_EQ(od.row(i).sum(), 3.0);
    EXPECT_TRUE(to_dense(make_factor({18, 27, 2, 3, 1})).isZero(0.0));
}

TEST(Factor, ApplyMatchesDenseOracleOnRandomFactors) {
    std::mt19937_64 rng(11);
    for (const auto& sig : all_valid_small()) {
        std::vector<double> v(sig.nnz());
        std::uniform_real_distribution<double> d(-1, 1);
        for (auto& x : v) x = d(rng);
        const auto f = make_factor(sig, v);
        const Matrix m = oracle::random_matrix(rng, sig.q, 3);
        std::uint64_t macs = 0;
        const Matrix got = apply_factor(f, m, &macs);
        ASSERT_LE(oracle::rel_diff(got, oracle::dense_factor(sig, v) * m), 1e-12);
        ASSERT_EQ(macs, sig.p * sig.s * 3);
        const Matrix l = oracle::random_matrix(rng, 3, sig.p);
        ASSERT_LE(oracle::rel_diff(right_multiply(l, f), l * oracle::dense_factor(sig, v)), 1e-12);
    }
}

TEST(Factor, CanonicalOrderRoundTrip) {
    std::mt19937_64 rng(5);
    const FactorSignature sig{18, 27, 2, 3, 1};
    std::vector<double> v(sig.nnz());
    std::uniform_real_distribution<double> d(-1, 1);
    for (auto& x : v) x = d(rng);
    const Matrix dense = to_dense(make_factor(sig, v));
    std::vector<double> back;
    for (auto [i, j] : nonzero_mask(sig)) back.push_back(dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    EXPECT_EQ(back, v);
}

TEST(Factor, ApplyRejectsWrongRowCount) {
    const auto f = make_factor({18, 27, 2, 3, 1});
    EXPECT_EQ(code_of([&] { apply_factor(f, Matrix::Zero(26, 2)); }), ErrorCode::ShapeMismatch);
}
