#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "fastrip/errors.hpp"
#include "fastrip/linalg.hpp"
#include "fastrip/operators.hpp"

namespace fastrip {

// Measurement operator surface used by the recovery algorithms: forward,
// adjoint, and single-column access only. No dense k x n view.
template <class Op>
concept MeasurementOperator = requires(const Op& op, const std::vector<double>& v,
                                       std::size_t j) {
    { op.rows() } -> std::convertible_to<std::size_t>;
    { op.cols() } -> std::convertible_to<std::size_t>;
    { op.forward(v) } -> std::convertible_to<std::vector<double>>;
    { op.adjoint(v) } -> std::convertible_to<std::vector<double>>;
    { op.column(j) } -> std::convertible_to<std::vector<double>>;
};

struct ChainOperator {
    const OperatorChain* chain;

    std::size_t rows() const { return chain->k; }
    std::size_t cols() const { return chain->n; }
    std::vector<double> forward(const std::vector<double>& x) const {
        return apply_chain(*chain, x, Direction::Forward);
    }
    std::vector<double> adjoint(const std::vector<double>& y) const {
        return apply_chain(*chain, y, Direction::Adjoint);
    }
    std::vector<double> column(std::size_t j) const {
        std::vector<double> e(chain->n, 0.0);
        e[j] = 1.0;
        return forward(e);
    }
};

struct RecoveryResult {
    std::vector<double> x_hat;
    int iterations = 0;
    double residual_norm = 0.0;
    bool support_recovered = false;
    double relative_error = std::numeric_limits<double>::quiet_NaN();
};

// Keep the s largest-magnitude entries, zeroing the rest; ties go to the
// lowest index.
inline std::vector<double> hard_threshold(const std::vector<double>& x, std::size_t s) {
    const std::size_t n = x.size();
    if (s >= n) return x;
    std::vector<double> out(n, 0.0);
    if (s == 0) return out;
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s - 1),
                     order.end(), [&](std::uint32_t a, std::uint32_t b) {
                         const double ma = std::abs(x[a]);
                         const double mb = std::abs(x[b]);
                         if (ma != mb) return ma > mb;
                         return a < b;
                     });
    for (std::size_t i = 0; i < s; ++i) out[order[i]] = x[order[i]];
    return out;
}

namespace detail {

inline std::vector<std::uint32_t> support_of(const std::vector<double>& x) {
    std::vector<std::uint32_t> idx;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) idx.push_back(static_cast<std::uint32_t>(i));
    return idx;
}

inline void fill_truth_fields(RecoveryResult& res, const std::vector<double>* truth) {
    if (!truth) return;
    const double denom = norm2(*truth);
    double err_sq = 0.0;
    for (std::size_t i = 0; i < truth->size(); ++i) {
        const double d = res.x_hat[i] - (*truth)[i];
        err_sq += d * d;
    }
    res.relative_error = denom > 0.0 ? std::sqrt(err_sq) / denom : std::sqrt(err_sq);
    res.support_recovered = support_of(res.x_hat) == support_of(*truth);
}

}  // namespace detail

// Iterative hard thresholding: x <- H_s(x + step * A*(y - Ax)).
template <MeasurementOperator Op>
RecoveryResult iht_recover(const Op& op, const std::vector<double>& y, std::size_t s,
                           int max_iters = 200, double tol = 1e-10, double step = 1.0,
                           const std::vector<double>* truth = nullptr) {
    if (y.size() != op.rows()) throw LengthMismatch("measurement length must equal k");
    RecoveryResult res;
    res.x_hat.assign(op.cols(), 0.0);
    for (int it = 1; it <= max_iters; ++it) {
        auto r = op.forward(res.x_hat);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
        res.residual_norm = norm2(r);
        res.iterations = it;
        if (res.residual_norm <= tol) break;
        const auto g = op.adjoint(r);
        std::vector<double> z = res.x_hat;
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += step * g[i];
        res.x_hat = hard_threshold(z, s);
        if (it == max_iters) {
            auto rf = op.forward(res.x_hat);
            for (std::size_t i = 0; i < rf.size(); ++i) rf[i] = y[i] - rf[i];
            res.residual_norm = norm2(rf);
        }
    }
    detail::fill_truth_fields(res, truth);
    return res;
}

// Orthogonal matching pursuit: s rounds of greedy column selection with a
// least-squares refit on the chosen support (normal equations on the
// s-column submatrix).
template <MeasurementOperator Op>
RecoveryResult omp_recover(const Op& op, const std::vector<double>& y, std::size_t s,
                           const std::vector<double>* truth = nullptr) {
    if (y.size() != op.rows()) throw LengthMismatch("measurement length must equal k");
    if (s > op.rows()) throw DegenerateInput("need s <= k for the refit to be determined");
    RecoveryResult res;
    res.x_hat.assign(op.cols(), 0.0);
    res.residual_norm = norm2(y);
    if (s == 0) {
        detail::fill_truth_fields(res, truth);
        return res;
    }

    std::vector<double> r = y;
    std::vector<std::uint32_t> support;
    std::vector<std::vector<double>> columns;
    std::vector<bool> chosen(op.cols(), false);
    std::vector<double> coef;

    for (std::size_t round = 0; round < s; ++round) {
        const auto corr = op.adjoint(r);
        std::size_t best = op.cols();
        double best_mag = -1.0;
        for (std::size_t j = 0; j < corr.size(); ++j) {
            if (chosen[j]) continue;
            const double mag = std::abs(corr[j]);
            if (mag > best_mag) {
                best_mag = mag;
                best = j;
            }
        }
        chosen[best] = true;
        support.push_back(static_cast<std::uint32_t>(best));
        columns.push_back(op.column(best));

        const std::size_t m = support.size();
        Matrix<double> gram(m, m);
        std::vector<double> rhs(m);
        for (std::size_t a = 0; a < m; ++a) {
            rhs[a] = inner(columns[a], y);
            for (std::size_t b = 0; b < m; ++b) gram(a, b) = inner(columns[a], columns[b]);
        }
        coef = cholesky_solve(std::move(gram), std::move(rhs));

        r = y;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= coef[a] * columns[a][i];
        res.iterations = static_cast<int>(round + 1);
        if (norm2(r) <= 1e-12 * norm2(y)) break;
    }

    for (std::size_t a = 0; a < support.size(); ++a) res.x_hat[support[a]] = coef[a];
    res.residual_norm = norm2(r);
    detail::fill_truth_fields(res, truth);
    return res;
}

}  // namespace fastrip
