#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "fastrip/errors.hpp"
#include "fastrip/linalg.hpp"
#include "fastrip/opcount.hpp"

namespace fastrip {

enum class TransformKind { WalshHadamard, DFT, DCT2 };

enum class Direction { Forward, Adjoint };

inline bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

inline std::size_t log2_exact(std::size_t n) {
    std::size_t l = 0;
    while ((std::size_t{1} << l) < n) ++l;
    return l;
}

// A fast unitary transform H: unitary, entries bounded by K * n^(-1/2),
// applied in O(n log n) multiply-adds.
struct FastTransformSpec {
    TransformKind kind = TransformKind::WalshHadamard;
    std::size_t n = 0;
    double K = 1.0;  // entry bound constant

    bool real_valued() const { return kind != TransformKind::DFT; }
};

inline double entry_bound_constant(TransformKind kind) {
    return kind == TransformKind::DCT2 ? std::sqrt(2.0) : 1.0;
}

inline FastTransformSpec make_transform(TransformKind kind, std::size_t n) {
    if (!is_power_of_two(n))
        throw NotPowerOfTwo("transform length " + std::to_string(n) +
                            " is not a power of two");
    return FastTransformSpec{kind, n, entry_bound_constant(kind)};
}

namespace detail {

// Unnormalized in-place Walsh-Hadamard butterfly (natural order).
// Counts one add and one subtract per pair: n ops per level.
template <class T>
void fwht_raw(std::vector<T>& v) {
    const std::size_t n = v.size();
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const T a = v[j];
                const T b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        opcount::add(n);
    }
}

// Unnormalized radix-2 FFT, sign = -1 forward, +1 inverse kernel.
// Counted at 10 scalar multiply-adds per butterfly pair: 5n per level.
inline void fft_raw(std::vector<std::complex<double>>& v, int sign) {
    const std::size_t n = v.size();
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
    const double two_pi = 6.283185307179586476925286766559;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double base = sign * two_pi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                const std::complex<double> w =
                    std::polar(1.0, base * static_cast<double>(j));
                const std::complex<double> a = v[i + j];
                const std::complex<double> b = v[i + j + len / 2] * w;
                v[i + j] = a + b;
                v[i + j + len / 2] = a - b;
            }
        }
        opcount::add(5 * n);
    }
}

// Unitary DCT-II via a length-n complex FFT (Makhoul's even-odd folding).
// Pre/post passes counted at 4n ops.
inline void dct2_unitary(std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n == 1) return;
    std::vector<std::complex<double>> v(n);
    for (std::size_t j = 0; j < n / 2; ++j) {
        v[j] = x[2 * j];
        v[n - 1 - j] = x[2 * j + 1];
    }
    fft_raw(v, -1);
    const double pi = 3.1415926535897932384626433832795;
    const double c0 = std::sqrt(1.0 / static_cast<double>(n));
    const double ck = std::sqrt(2.0 / static_cast<double>(n));
    x[0] = c0 * v[0].real();
    for (std::size_t k = 1; k < n; ++k) {
        const std::complex<double> w =
            std::polar(1.0, -pi * static_cast<double>(k) / (2.0 * static_cast<double>(n)));
        x[k] = ck * (w * v[k]).real();
    }
    opcount::add(4 * n);
}

// Unitary DCT-III (the adjoint of dct2_unitary), via one inverse FFT.
inline void dct3_unitary(std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n == 1) return;
    const double pi = 3.1415926535897932384626433832795;
    const double c0 = std::sqrt(1.0 / static_cast<double>(n));
    const double ck = std::sqrt(2.0 / static_cast<double>(n));
    // Undo the unitary scaling, then rebuild the Hermitian FFT values
    // V_k = e^{i pi k / 2n} (a_k - i a_{n-k}) with a_n := 0.
    std::vector<double> a(n);
    a[0] = x[0] / c0;
    for (std::size_t k = 1; k < n; ++k) a[k] = x[k] / ck;
    std::vector<std::complex<double>> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double an_k = (k == 0) ? 0.0 : a[n - k];
        const std::complex<double> w =
            std::polar(1.0, pi * static_cast<double>(k) / (2.0 * static_cast<double>(n)));
        v[k] = w * std::complex<double>(a[k], -an_k);
    }
    fft_raw(v, +1);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n / 2; ++j) {
        x[2 * j] = v[j].real() * inv_n;
        x[2 * j + 1] = v[n - 1 - j].real() * inv_n;
    }
    opcount::add(4 * n);
}

template <class T>
void dct2_dispatch(std::vector<T>& x, Direction dir) {
    if constexpr (is_complex_v<T>) {
        const std::size_t n = x.size();
        std::vector<double> re(n), im(n);
        for (std::size_t i = 0; i < n; ++i) {
            re[i] = x[i].real();
            im[i] = x[i].imag();
        }
        if (dir == Direction::Forward) {
            dct2_unitary(re);
            dct2_unitary(im);
        } else {
            dct3_unitary(re);
            dct3_unitary(im);
        }
        for (std::size_t i = 0; i < n; ++i) x[i] = {re[i], im[i]};
    } else {
        if (dir == Direction::Forward)
            dct2_unitary(x);
        else
            dct3_unitary(x);
    }
}

}  // namespace detail

// In-place raw application for chain composition. Returns the scalar the
// result must be multiplied by to make the stage unitary (deferred so that
// composed chains can fold all normalizations into one final pass).
template <class T>
double apply_transform_raw(const FastTransformSpec& spec, std::vector<T>& x, Direction dir) {
    if (x.size() != spec.n)
        throw LengthMismatch("vector length " + std::to_string(x.size()) +
                             " does not match transform length " + std::to_string(spec.n));
    switch (spec.kind) {
        case TransformKind::WalshHadamard:
            detail::fwht_raw(x);  // self-adjoint
            return 1.0 / std::sqrt(static_cast<double>(spec.n));
        case TransformKind::DFT:
            if constexpr (is_complex_v<T>) {
                detail::fft_raw(x, dir == Direction::Forward ? -1 : +1);
                return 1.0 / std::sqrt(static_cast<double>(spec.n));
            } else {
                throw FieldMismatch("DFT requires a complex pipeline");
            }
        case TransformKind::DCT2:
            detail::dct2_dispatch(x, dir);
            return 1.0;
    }
    throw Error("unreachable");
}

// Unitary application of H (forward) or H* (adjoint), in place.
template <class T>
void apply_transform(const FastTransformSpec& spec, std::vector<T>& x, Direction dir) {
    const double scale = apply_transform_raw(spec, x, dir);
    if (scale != 1.0)
        for (auto& v : x) v *= scale;
}

template <class T>
std::vector<T> transformed(const FastTransformSpec& spec, std::vector<T> x, Direction dir) {
    apply_transform(spec, x, dir);
    return x;
}

inline constexpr std::size_t kMaterializeCap = 4096;

// Column-by-column materialization; test oracle for unitarity and the
// entry bound. Guarded against accidental huge allocations.
template <class T>
Matrix<T> materialize_transform(const FastTransformSpec& spec) {
    if (spec.n > kMaterializeCap)
        throw SizeGuard("refusing to materialize transform of length " +
                        std::to_string(spec.n));
    Matrix<T> m(spec.n, spec.n);
    std::vector<T> col(spec.n);
    for (std::size_t j = 0; j < spec.n; ++j) {
        std::fill(col.begin(), col.end(), T{});
        col[j] = T{1};
        apply_transform(spec, col, Direction::Forward);
        for (std::size_t i = 0; i < spec.n; ++i) m(i, j) = col[i];
    }
    return m;
}

}  // namespace fastrip
