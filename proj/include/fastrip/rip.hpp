#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fastrip/errors.hpp"
#include "fastrip/linalg.hpp"
#include "fastrip/operators.hpp"
#include "fastrip/prng.hpp"

namespace fastrip {

enum class RipMethod { ExactEnumeration, MonteCarlo };

// delta_s estimate under the non-squared RIP convention
// (1-delta)||x|| <= ||Ax|| <= (1+delta)||x||; delta > 1 is allowed.
// `delta_squared` reports the same extremum under the squared convention
// for cross-paper comparison.
struct RipEstimate {
    std::size_t s = 0;
    double delta = 0.0;
    double delta_squared = 0.0;
    RipMethod method = RipMethod::ExactEnumeration;
    std::optional<SupportSet> witness_support;
    std::vector<double> witness_vector;  // MonteCarlo only (real part for complex chains)
    std::uint64_t trials = 0;
};

inline constexpr std::size_t kJacobiDimCap = 64;
inline constexpr double kSupportEnumerationCap = 1e6;

// Extreme singular values of a k x s matrix via cyclic Jacobi on the
// s x s Gram matrix (Hermitian inputs go through the real 2s x 2s
// embedding, which preserves the extreme eigenvalues).
template <class T>
std::pair<double, double> extremal_singular_values(const Matrix<T>& m) {
    if (m.cols > kJacobiDimCap)
        throw SizeGuard("extremal_singular_values limited to " +
                        std::to_string(kJacobiDimCap) + " columns");
    Matrix<T> gram(m.cols, m.cols);
    for (std::size_t a = 0; a < m.cols; ++a)
        for (std::size_t b = 0; b < m.cols; ++b) {
            T acc{};
            for (std::size_t i = 0; i < m.rows; ++i)
                acc += conj_if(m(i, a)) * m(i, b);
            gram(a, b) = acc;
        }
    std::pair<double, double> eig;
    if constexpr (is_complex_v<T>) {
        eig = jacobi_extremal_eigenvalues(real_embedding(gram));
    } else {
        eig = jacobi_extremal_eigenvalues(gram);
    }
    return {std::sqrt(std::max(0.0, eig.first)), std::sqrt(std::max(0.0, eig.second))};
}

namespace detail {

inline double binomial_estimate(std::size_t n, std::size_t s) {
    double c = 1.0;
    for (std::size_t i = 0; i < s; ++i) {
        c *= static_cast<double>(n - i) / static_cast<double>(i + 1);
        if (c > 1e18) return c;
    }
    return c;
}

}  // namespace detail

// delta_s by exhaustive enumeration of all s-supports; the extremal
// deviation max(sigma_max - 1, 1 - sigma_min) over column submatrices.
template <class T>
RipEstimate exact_rip_constant(const Matrix<T>& a, std::size_t s) {
    const std::size_t n = a.cols;
    if (s == 0 || s > n) throw DegenerateInput("need 1 <= s <= n");
    if (detail::binomial_estimate(n, s) > kSupportEnumerationCap)
        throw TooManySupports("C(n, s) exceeds the enumeration cap");

    RipEstimate est;
    est.s = s;
    est.method = RipMethod::ExactEnumeration;

    std::vector<std::uint32_t> support(s);
    for (std::size_t i = 0; i < s; ++i) support[i] = static_cast<std::uint32_t>(i);

    Matrix<T> sub(a.rows, s);
    while (true) {
        for (std::size_t j = 0; j < s; ++j)
            for (std::size_t i = 0; i < a.rows; ++i) sub(i, j) = a(i, support[j]);
        const auto [smin, smax] = extremal_singular_values(sub);
        const double dev = std::max(smax - 1.0, 1.0 - smin);
        const double dev_sq = std::max(smax * smax - 1.0, 1.0 - smin * smin);
        est.delta_squared = std::max(est.delta_squared, dev_sq);
        if (dev > est.delta || !est.witness_support) {
            est.delta = std::max(est.delta, dev);
            est.witness_support = SupportSet{support, n};
        }
        // next lexicographic s-combination of {0..n-1}
        std::size_t i = s;
        while (i-- > 0) {
            if (support[i] + (s - i) < n) {
                ++support[i];
                for (std::size_t j = i + 1; j < s; ++j) support[j] = support[j - 1] + 1;
                break;
            }
            if (i == 0) return est;
        }
    }
}

namespace detail {

// Random s-sparse unit vector: support uniform over C(n,s), coefficients
// uniform on the sphere of the support.
template <class T>
std::vector<T> random_sparse_unit(CounterRng& rng, std::size_t n, std::size_t s) {
    std::vector<std::uint32_t> idx;
    idx.reserve(s);
    std::vector<bool> used(n, false);
    while (idx.size() < s) {
        const auto c = static_cast<std::uint32_t>(rng.next_below(n));
        if (!used[c]) {
            used[c] = true;
            idx.push_back(c);
        }
    }
    std::vector<T> x(n, T{});
    double nrm_sq = 0.0;
    for (const auto i : idx) {
        if constexpr (is_complex_v<T>) {
            x[i] = T{rng.next_gaussian(), rng.next_gaussian()};
        } else {
            x[i] = rng.next_gaussian();
        }
        nrm_sq += abs_sq(x[i]);
    }
    const double inv = 1.0 / std::sqrt(nrm_sq);
    for (const auto i : idx) x[i] *= inv;
    return x;
}

template <class T>
RipEstimate monte_carlo_rip_impl(const OperatorChain& chain, std::size_t s,
                                 std::uint64_t trials, std::uint64_t seed) {
    RipEstimate est;
    est.s = s;
    est.method = RipMethod::MonteCarlo;
    est.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t) {
        CounterRng rng(derive_seed(seed, t, SeedRole::Trial));
        const auto x = random_sparse_unit<T>(rng, chain.n, s);
        const double nrm = norm2(apply_chain(chain, x, Direction::Forward));
        const double dev = std::abs(nrm - 1.0);
        est.delta_squared = std::max(est.delta_squared, std::abs(nrm * nrm - 1.0));
        if (dev > est.delta || t == 0) {
            est.delta = std::max(est.delta, dev);
            est.witness_vector.resize(chain.n);
            for (std::size_t i = 0; i < chain.n; ++i) {
                if constexpr (is_complex_v<T>)
                    est.witness_vector[i] = x[i].real();
                else
                    est.witness_vector[i] = x[i];
            }
        }
    }
    return est;
}

}  // namespace detail

// Certified lower bound on delta_s: max deviation of ||Ax|| from 1 over
// random s-sparse unit probes. Trial t draws from stream (seed, t), so
// larger trial counts extend smaller ones.
inline RipEstimate monte_carlo_rip(const OperatorChain& chain, std::size_t s,
                                   std::uint64_t trials, std::uint64_t seed) {
    if (trials < 1) throw DegenerateInput("need trials >= 1");
    if (s == 0 || s > chain.n) throw DegenerateInput("need 1 <= s <= n");
    if (chain.requires_complex())
        return detail::monte_carlo_rip_impl<std::complex<double>>(chain, s, trials, seed);
    return detail::monte_carlo_rip_impl<double>(chain, s, trials, seed);
}

// Empirical distribution of alpha(x) = ||A x|| over fresh sign draws.
struct ChaosStats {
    double mean_alpha_sq = 0.0;
    double median_alpha = 0.0;
    double variance = 0.0;
    std::map<double, double> quantiles;  // level -> value
    std::uint64_t trials = 0;
    std::vector<double> alphas;  // sorted
};

namespace detail {

template <class T>
ChaosStats chaos_statistics_impl(const OperatorChain& chain, const std::vector<T>& x,
                                 std::uint64_t trials, std::uint64_t seed) {
    ChaosStats st;
    st.trials = trials;
    st.alphas.reserve(trials);
    double sum_sq = 0.0, sum = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const auto drawn = redraw_signs(chain, derive_seed(seed, t, SeedRole::Trial));
        const double alpha = norm2(apply_chain(drawn, x, Direction::Forward));
        st.alphas.push_back(alpha);
        sum += alpha;
        sum_sq += alpha * alpha;
    }
    std::sort(st.alphas.begin(), st.alphas.end());
    const double mean = sum / static_cast<double>(trials);
    st.mean_alpha_sq = sum_sq / static_cast<double>(trials);
    st.variance = st.mean_alpha_sq - mean * mean;
    auto quantile = [&](double level) {
        const auto idx = std::min<std::size_t>(
            st.alphas.size() - 1,
            static_cast<std::size_t>(level * static_cast<double>(st.alphas.size())));
        return st.alphas[idx];
    };
    st.median_alpha = quantile(0.5);
    for (const double q : {0.9, 0.99, 0.999}) st.quantiles[q] = quantile(q);
    st.quantiles[0.5] = st.median_alpha;
    return st;
}

}  // namespace detail

// Redraws (eps, eps') per trial with Omega and the transform structure of
// `chain` held fixed; x must be a unit vector.
template <class T>
ChaosStats chaos_statistics(const OperatorChain& chain, const std::vector<T>& x,
                            std::uint64_t trials, std::uint64_t seed) {
    if (std::abs(norm2(x) - 1.0) > 1e-10) throw NotUnitNorm("probe vector must be unit norm");
    if (trials < 100) throw DegenerateInput("need trials >= 100");
    return detail::chaos_statistics_impl(chain, x, trials, seed);
}

// Greedy mu-separated net of unit vectors in R^m. Maximality is certified
// probabilistically: the greedy loop stops after 10^4 * |points|
// consecutive rejected candidates, which also sets the `maximal` flag.
struct SeparatedNet {
    std::size_t m = 0;
    double mu = 0.0;
    std::vector<std::vector<double>> points;
    bool maximal = false;
};

namespace detail {

// Spatial hash over cells of side mu; buckets are supersets (hash
// collisions only add distance checks, never drop a true neighbor).
class NetGrid {
public:
    NetGrid(std::size_t m, double mu) : m_(m), mu_(mu) {}

    std::uint64_t cell_key(const std::vector<double>& p) const {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (std::size_t d = 0; d < m_; ++d) {
            const auto c = static_cast<std::uint64_t>(
                static_cast<std::int64_t>(std::floor((p[d] + 2.0) / mu_)));
            h = splitmix64(h ^ splitmix64(c + (d << 32)));
        }
        return h;
    }

    bool has_neighbor_within(const std::vector<std::vector<double>>& pts,
                            const std::vector<double>& cand, double radius) const {
        const double r_sq = radius * radius;
        std::vector<std::int64_t> base(m_);
        for (std::size_t d = 0; d < m_; ++d)
            base[d] = static_cast<std::int64_t>(std::floor((cand[d] + 2.0) / mu_));
        std::vector<int> off(m_, -1);
        while (true) {
            std::uint64_t h = 0x9e3779b97f4a7c15ULL;
            for (std::size_t d = 0; d < m_; ++d) {
                const auto c = static_cast<std::uint64_t>(base[d] + off[d]);
                h = splitmix64(h ^ splitmix64(c + (d << 32)));
            }
            if (const auto it = buckets_.find(h); it != buckets_.end()) {
                for (const auto idx : it->second) {
                    double d_sq = 0.0;
                    for (std::size_t d = 0; d < m_; ++d) {
                        const double diff = pts[idx][d] - cand[d];
                        d_sq += diff * diff;
                        if (d_sq > r_sq) break;
                    }
                    if (d_sq <= r_sq) return true;
                }
            }
            std::size_t d = 0;
            for (; d < m_; ++d) {
                if (off[d] < 1) {
                    ++off[d];
                    break;
                }
                off[d] = -1;
            }
            if (d == m_) return false;
        }
    }

    void insert(const std::vector<double>& p, std::uint32_t idx) {
        buckets_[cell_key(p)].push_back(idx);
    }

private:
    std::size_t m_;
    double mu_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets_;
};

}  // namespace detail

inline SeparatedNet build_separated_net(std::size_t m, double mu, std::uint64_t seed) {
    if (m < 1 || m > 8) throw DegenerateInput("net dimension must be in [1, 8]");
    if (!(mu > 0.0) || !(mu < 2.0)) throw DegenerateInput("need 0 < mu < 2");
    SeparatedNet net;
    net.m = m;
    net.mu = mu;
    detail::NetGrid grid(m, mu);
    CounterRng rng(seed);
    std::uint64_t consecutive_rejects = 0;
    while (true) {
        const std::uint64_t budget =
            10000 * std::max<std::uint64_t>(1, net.points.size());
        if (consecutive_rejects >= budget && !net.points.empty()) {
            net.maximal = true;
            break;
        }
        std::vector<double> cand(m);
        double nrm_sq = 0.0;
        for (auto& v : cand) {
            v = rng.next_gaussian();
            nrm_sq += v * v;
        }
        if (nrm_sq == 0.0) continue;
        const double inv = 1.0 / std::sqrt(nrm_sq);
        for (auto& v : cand) v *= inv;
        if (grid.has_neighbor_within(net.points, cand, mu)) {
            ++consecutive_rejects;
            continue;
        }
        grid.insert(cand, static_cast<std::uint32_t>(net.points.size()));
        net.points.push_back(std::move(cand));
        consecutive_rejects = 0;
    }
    return net;
}

inline double net_covering_distance(const SeparatedNet& net, const std::vector<double>& probe) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : net.points) {
        double d_sq = 0.0;
        for (std::size_t i = 0; i < net.m; ++i) {
            const double diff = p[i] - probe[i];
            d_sq += diff * diff;
        }
        best = std::min(best, std::sqrt(d_sq));
    }
    return best;
}

// Split w into ceil(n/s) disjoint s-sparse blocks, sorted by decreasing
// magnitude; blocks sum to w exactly, and when ||w||_1 <= sqrt(s) rho and
// ||w||_2 <= rho the block norms sum to at most 2 rho.
template <class T>
std::vector<std::vector<T>> block_decompose(const std::vector<T>& w, std::size_t s) {
    if (s < 1) throw DegenerateInput("need s >= 1");
    const std::size_t n = w.size();
    const std::size_t blocks = (n + s - 1) / s;
    std::vector<std::uint32_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double ma = std::abs(w[a]);
        const double mb = std::abs(w[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    });
    std::vector<std::vector<T>> out(blocks, std::vector<T>(n, T{}));
    for (std::size_t r = 0; r < n; ++r) out[r / s][order[r]] = w[order[r]];
    return out;
}

}  // namespace fastrip
