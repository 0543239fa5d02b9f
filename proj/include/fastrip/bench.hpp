#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include "fastrip/chain_spec.hpp"
#include "fastrip/opcount.hpp"
#include "fastrip/operators.hpp"
#include "fastrip/prng.hpp"

namespace fastrip {

// Multiply-add cost of one transform under the instrumented kernels:
// n log2 n for the WHT butterfly, 5 n log2 n for the radix-2 FFT, and
// the FFT plus 4n pre/post work for the DCT pair.
inline std::uint64_t transform_op_count(const FastTransformSpec& spec) {
    const auto n = static_cast<std::uint64_t>(spec.n);
    const auto l = static_cast<std::uint64_t>(log2_exact(spec.n));
    switch (spec.kind) {
        case TransformKind::WalshHadamard: return n * l;
        case TransformKind::DFT: return 5 * n * l;
        case TransformKind::DCT2: return 5 * n * l + 4 * n;
    }
    return 0;
}

// Exact multiply-add count of one forward application; matches the
// instrumented kernel counters.
inline std::uint64_t count_operations(const OperatorChain& chain) {
    std::uint64_t ops = 0;
    double running = chain.scale;
    for (const auto& st : chain.stages) {
        std::visit(
            [&](const auto& stage) {
                using S = std::decay_t<decltype(stage)>;
                if constexpr (std::is_same_v<S, SignDiagStage>) {
                    ops += stage.signs.signs.size();
                } else if constexpr (std::is_same_v<S, TransformStage>) {
                    ops += transform_op_count(stage.spec);
                    if (stage.spec.kind != TransformKind::DCT2)
                        running /= std::sqrt(static_cast<double>(stage.spec.n));
                } else if constexpr (std::is_same_v<S, DenseProjectorStage>) {
                    ops += 2 * static_cast<std::uint64_t>(stage.rows.rows) *
                           stage.rows.cols;
                }
                // subsampling is a gather: zero multiply-adds
            },
            st);
    }
    if (running != 1.0) ops += chain.k;  // final scaling pass
    return ops;
}

struct ScalingRow {
    Construction construction;
    std::size_t n = 0;
    std::size_t k = 0;
    int r = 0;
    std::uint64_t ops = 0;
    double median_ms = 0.0;
    double ratio = 0.0;  // median(n) / median(n/2), 0 for the first row
};

using ScalingReport = std::vector<ScalingRow>;

namespace detail {

inline int chain_block_r(const OperatorChain& chain) {
    if (chain.tag != Construction::Theorem2) return 0;
    int sign_stages = 0;
    for (const auto& st : chain.stages)
        if (std::holds_alternative<SignDiagStage>(st)) ++sign_stages;
    return sign_stages / 2 - 1;
}

}  // namespace detail

// Wall-clock medians of the fast apply across n; k is scaled in proportion
// to the base recipe. Sequential and single-threaded so medians mean
// something.
inline ScalingReport scaling_sweep(const ChainRecipe& base,
                                   const std::vector<std::size_t>& n_list, int repeats) {
    ScalingReport report;
    const double k_frac =
        static_cast<double>(base.k) / static_cast<double>(base.n);
    double prev_median = 0.0;
    for (const auto n : n_list) {
        ChainRecipe r = base;
        r.n = n;
        r.k = std::max<std::size_t>(1, static_cast<std::size_t>(
                                           std::round(k_frac * static_cast<double>(n))));
        const auto chain = build_chain(r);

        std::vector<double> x(n);
        CounterRng rng(derive_seed(base.seed, n, SeedRole::Probe));
        for (auto& v : x) v = rng.next_gaussian();

        std::uint64_t ops = 0;
        {
            opcount::Scope scope;
            (void)apply_chain(chain, x, Direction::Forward);
            ops = scope.count();
        }

        std::vector<double> times;
        times.reserve(static_cast<std::size_t>(std::max(1, repeats)));
        volatile double sink = 0.0;
        for (int rep = 0; rep < std::max(1, repeats); ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto y = apply_chain(chain, x, Direction::Forward);
            const auto t1 = std::chrono::steady_clock::now();
            sink = sink + y[0];
            times.push_back(
                std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
        std::sort(times.begin(), times.end());
        const double median = times[times.size() / 2];

        ScalingRow row;
        row.construction = chain.tag;
        row.n = n;
        row.k = r.k;
        row.r = detail::chain_block_r(chain);
        row.ops = ops;
        row.median_ms = median;
        row.ratio = prev_median > 0.0 ? median / prev_median : 0.0;
        prev_median = median;
        report.push_back(row);
    }
    return report;
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fastrip
