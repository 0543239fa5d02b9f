#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <type_traits>
#include <utility>
#include <vector>

#include "fastrip/errors.hpp"

namespace fastrip {

template <class T>
inline constexpr bool is_complex_v = false;
template <class T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

template <class T>
double abs_sq(const T& v) {
    if constexpr (is_complex_v<T>) {
        return v.real() * v.real() + v.imag() * v.imag();
    } else {
        return v * v;
    }
}

template <class T>
T conj_if(const T& v) {
    if constexpr (is_complex_v<T>) {
        return std::conj(v);
    } else {
        return v;
    }
}

template <class T>
double norm2(const std::vector<T>& x) {
    double s = 0.0;
    for (const auto& v : x) s += abs_sq(v);
    return std::sqrt(s);
}

template <class T>
double norm1(const std::vector<T>& x) {
    double s = 0.0;
    for (const auto& v : x) s += std::abs(v);
    return s;
}

// <x, y> with conjugation on the first argument.
template <class T>
T inner(const std::vector<T>& x, const std::vector<T>& y) {
    T s{};
    for (std::size_t i = 0; i < x.size(); ++i) s += conj_if(x[i]) * y[i];
    return s;
}

// Minimal row-major dense matrix.
template <class T>
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T{}) {}

    T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::vector<T> matvec(const std::vector<T>& x) const {
        std::vector<T> y(rows, T{});
        for (std::size_t i = 0; i < rows; ++i) {
            T acc{};
            const T* row = &data[i * cols];
            for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
        return y;
    }

    // Conjugate-transpose product A* x.
    std::vector<T> adjoint_matvec(const std::vector<T>& x) const {
        std::vector<T> y(cols, T{});
        for (std::size_t i = 0; i < rows; ++i) {
            const T* row = &data[i * cols];
            for (std::size_t j = 0; j < cols; ++j) y[j] += conj_if(row[j]) * x[i];
        }
        return y;
    }
};

// Eigenvalue range of a symmetric matrix by cyclic Jacobi rotations.
// Converges when the largest off-diagonal magnitude drops below
// 1e-12 relative to the diagonal scale.
inline std::pair<double, double> jacobi_extremal_eigenvalues(Matrix<double> g,
                                                            int max_sweeps = 100) {
    const std::size_t m = g.rows;
    if (m == 0) return {0.0, 0.0};
    if (m == 1) return {g(0, 0), g(0, 0)};

    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(g(i, i)));
    const double tol = 1e-12 * (scale > 0.0 ? scale : 1.0);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) off = std::max(off, std::abs(g(p, q)));
        if (off <= tol) {
            double lo = g(0, 0), hi = g(0, 0);
            for (std::size_t i = 1; i < m; ++i) {
                lo = std::min(lo, g(i, i));
                hi = std::max(hi, g(i, i));
            }
            return {lo, hi};
        }
        for (std::size_t p = 0; p + 1 < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                const double apq = g(p, q);
                if (std::abs(apq) <= tol * 1e-3) continue;
                const double app = g(p, p);
                const double aqq = g(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < m; ++i) {
                    const double gip = g(i, p);
                    const double giq = g(i, q);
                    g(i, p) = c * gip - s * giq;
                    g(i, q) = s * gip + c * giq;
                }
                for (std::size_t j = 0; j < m; ++j) {
                    const double gpj = g(p, j);
                    const double gqj = g(q, j);
                    g(p, j) = c * gpj - s * gqj;
                    g(q, j) = s * gpj + c * gqj;
                }
            }
        }
    }
    throw NoConvergence("jacobi eigenvalue iteration did not converge");
}

// Real symmetric embedding of a Hermitian matrix: [[Re, -Im], [Im, Re]].
// Spectrum equals that of the Hermitian input, with doubled multiplicity.
inline Matrix<double> real_embedding(const Matrix<std::complex<double>>& h) {
    const std::size_t m = h.rows;
    Matrix<double> e(2 * m, 2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double re = h(i, j).real();
            const double im = h(i, j).imag();
            e(i, j) = re;
            e(i + m, j + m) = re;
            e(i, j + m) = -im;
            e(i + m, j) = im;
        }
    }
    return e;
}

// Solve the SPD system G x = b by Cholesky factorization.
// Throws SingularSubproblem when a pivot collapses.
inline std::vector<double> cholesky_solve(Matrix<double> g, std::vector<double> b) {
    const std::size_t m = g.rows;
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i) scale = std::max(scale, std::abs(g(i, i)));
    const double floor = 1e-13 * (scale > 0.0 ? scale : 1.0);

    for (std::size_t j = 0; j < m; ++j) {
        double d = g(j, j);
        for (std::size_t p = 0; p < j; ++p) d -= g(j, p) * g(j, p);
        if (d <= floor) throw SingularSubproblem("rank-deficient normal equations");
        const double l = std::sqrt(d);
        g(j, j) = l;
        for (std::size_t i = j + 1; i < m; ++i) {
            double v = g(i, j);
            for (std::size_t p = 0; p < j; ++p) v -= g(i, p) * g(j, p);
            g(i, j) = v / l;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        double v = b[i];
        for (std::size_t p = 0; p < i; ++p) v -= g(i, p) * b[p];
        b[i] = v / g(i, i);
    }
    for (std::size_t ii = m; ii-- > 0;) {
        double v = b[ii];
        for (std::size_t p = ii + 1; p < m; ++p) v -= g(p, ii) * b[p];
        b[ii] = v / g(ii, ii);
    }
    return b;
}

}  // namespace fastrip
