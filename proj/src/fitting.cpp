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

#include "debut/fitting.hpp"

#include <cmath>
#include <string>

namespace debut {

using Idx = Eigen::Index;

namespace {

void check_target(const DeButChain& c, const Matrix& target) {
    if (static_cast<std::size_t>(target.rows()) != c.rows() ||
        static_cast<std::size_t>(target.cols()) != c.cols()) {
        throw Error(ErrorCode::ShapeMismatch,
                    "target is " + std::to_string(target.rows()) + "x" + std::to_string(target.cols()) +
                        ", chain product is " + std::to_string(c.rows()) + "x" + std::to_string(c.cols()));
    }
}

double relative_error(const Matrix& model, const Matrix& target) {
    const double tn = target.norm();
    const double dn = (target - model).norm();
    if (tn == 0.0) return dn == 0.0 ? 0.0 : dn;
    return dn / tn;
}

// Dense product of factors [begin, end), identity when empty.
Matrix right_product(const DeButChain& c, std::size_t end) {
    const Idx n = static_cast<Idx>(c.cols());
    if (end == 0) return Matrix::Identity(n, n);
    Matrix g = to_dense(c[0]);
    for (std::size_t i = 1; i < end; ++i) g = apply_factor(c[i], g);
    return g;
}

Matrix left_product(const DeButChain& c, std::size_t begin) {
    if (begin >= c.size()) {
        const Idx n = static_cast<Idx>(c.rows());
        return Matrix::Identity(n, n);
    }
    Matrix l = to_dense(c[c.size() - 1]);
    for (std::size_t i = c.size() - 1; i-- > begin;) l = right_multiply(l, c[i]);
    return l;
}

}  // namespace

double fit_error(const DeButChain& c, const Matrix& target) {
    check_target(c, target);
    return relative_error(expand_chain(c), target);
}

DeButFactor solve_factor(const DeButChain& c, std::size_t j, const Matrix& target, double ridge) {
    check_target(c, target);
    const auto& sig = c[j].signature();
    const Matrix left = left_product(c, j + 1);   // p_m x p_j
    const Matrix right = right_product(c, j);     // q_j x q_1
    const Matrix projected = j == 0 ? target : Matrix(target * right.transpose());  // p_m x q_j

    // The model entry is sum over nonzeros (u,v) of L[:,u] R[u,v] G[v,:]. Two
    // nonzeros only interact in the normal equations when they share the
    // block index and the diagonal residue, so the system splits into
    // b*t independent (r*s) x (r*s) problems.
    const std::size_t r = sig.r, s = sig.s, t = sig.t;
    const std::size_t blocks = sig.blocks();
    const std::size_t n = r * s;
    std::vector<double> values(sig.nnz(), 0.0);

    Eigen::MatrixXd normal(static_cast<Idx>(n), static_cast<Idx>(n));
    Eigen::VectorXd rhs(static_cast<Idx>(n));
    std::vector<std::size_t> rows(r), cols(s);
    Matrix lg(left.rows(), static_cast<Idx>(r));
    Matrix gt(right.cols(), static_cast<Idx>(s));

    auto singular = [&] {
        return Error(ErrorCode::SingularSystem,
                     "rank-deficient normal equations for factor " + std::to_string(j + 1), j + 1);
    };

    for (std::size_t beta = 0; beta < blocks; ++beta) {
        for (std::size_t tau = 0; tau < t; ++tau) {
            for (std::size_t a = 0; a < r; ++a) rows[a] = beta * r * t + a * t + tau;
            for (std::size_t b = 0; b < s; ++b) cols[b] = beta * s * t + b * t + tau;
            for (std::size_t a = 0; a < r; ++a) lg.col(static_cast<Idx>(a)) = left.col(static_cast<Idx>(rows[a]));
            for (std::size_t b = 0; b < s; ++b)
                gt.col(static_cast<Idx>(b)) = right.row(static_cast<Idx>(cols[b])).transpose();

            Matrix x;  // r x s
            if (ridge > 0.0) {
                const Matrix ltl = lg.transpose() * lg;
                const Matrix ggt = gt.transpose() * gt;
                Matrix proj(left.rows(), static_cast<Idx>(s));
                for (std::size_t b = 0; b < s; ++b)
                    proj.col(static_cast<Idx>(b)) = projected.col(static_cast<Idx>(cols[b]));
                const Matrix lp = lg.transpose() * proj;
                for (std::size_t a = 0; a < r; ++a)
                    for (std::size_t b = 0; b < s; ++b) {
                        const Idx row = static_cast<Idx>(a * s + b);
                        rhs(row) = lp(static_cast<Idx>(a), static_cast<Idx>(b));
                        for (std::size_t a2 = 0; a2 < r; ++a2)
                            for (std::size_t b2 = 0; b2 < s; ++b2)
                                normal(row, static_cast<Idx>(a2 * s + b2)) =
                                    ltl(static_cast<Idx>(a), static_cast<Idx>(a2)) *
                                    ggt(static_cast<Idx>(b), static_cast<Idx>(b2));
                    }
                const double mean_diag = normal.diagonal().mean();
                normal.diagonal().array() += ridge * (mean_diag > 0.0 ? mean_diag : 1.0);
                const Eigen::VectorXd sol = normal.ldlt().solve(rhs);
                x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                    sol.data(), static_cast<Idx>(r), static_cast<Idx>(s));
            } else {
                // The group system is a Kronecker product, so its solution is
                // pinv(L_g) * T * pinv(G_g) with both factors solved by QR.
                Eigen::ColPivHouseholderQR<Matrix> qr_l(lg);
                Eigen::ColPivHouseholderQR<Matrix> qr_g(gt);
                if (qr_l.rank() < static_cast<Idx>(r) || qr_g.rank() < static_cast<Idx>(s)) throw singular();
                const Matrix z = qr_l.solve(target);          // r x q_1
                x = qr_g.solve(z.transpose()).transpose();     // r x s
            }
            for (std::size_t a = 0; a < r; ++a)
                for (std::size_t b = 0; b < s; ++b)
                    values[rows[a] * s + b] = x(static_cast<Idx>(a), static_cast<Idx>(b));
        }
    }
    return c[j].with_values(std::move(values));
}

FitResult als_fit(const DeButChain& structure, const Matrix& target, const FitOptions& opts) {
    check_target(structure, target);
    if (opts.max_sweeps == 0) throw Error(ErrorCode::InvalidArgument, "max_sweeps must be >= 1");
    if (opts.ridge < 0.0) throw Error(ErrorCode::InvalidArgument, "ridge must be nonnegative");

    std::vector<DeButFactor> factors = random_init(structure, opts.seed, InitScheme::UniformFanin).factors();
    FitReport report;
    report.initial_error = relative_error(expand_chain(DeButChain(factors)), target);

    const std::size_t m = factors.size();
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < m; ++j) order.push_back(j);
    for (std::size_t j = m - 1; j-- > 0;) order.push_back(j);

    double prev = report.initial_error;
    for (std::size_t sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        for (std::size_t j : order) {
            DeButChain current(factors);
            factors[j] = solve_factor(current, j, target, opts.ridge);
            const double err = relative_error(expand_chain(DeButChain(factors)), target);
            report.error_trace.push_back({sweep, j + 1, err});
            if (err == 0.0) break;
        }
        const double err = report.error_trace.back().error;
        report.sweep_errors.push_back(err);
        report.sweeps_used = sweep;
        if (err == 0.0 || prev - err < opts.rel_tol * prev) break;
        prev = err;
    }
    report.final_error = report.sweep_errors.back();
    return {DeButChain(std::move(factors)), std::move(report)};
}

}  // namespace debut
