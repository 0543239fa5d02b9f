#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fastrip/errors.hpp"
#include "fastrip/linalg.hpp"
#include "fastrip/opcount.hpp"
#include "fastrip/prng.hpp"
#include "fastrip/transforms.hpp"

namespace fastrip {

// Rademacher sign diagonal, reproducible from (seed, n).
struct SignVector {
    std::vector<double> signs;  // entries in {+1, -1}
    std::uint64_t seed = 0;
};

inline SignVector draw_sign_vector(std::uint64_t seed, std::size_t n) {
    SignVector sv;
    sv.seed = seed;
    sv.signs.resize(n);
    CounterRng rng(seed);
    for (std::size_t i = 0; i < n; ++i) sv.signs[i] = rng.next_sign();
    return sv;
}

inline SignVector all_ones_signs(std::size_t n) {
    return SignVector{std::vector<double>(n, 1.0), 0};
}

// Sorted index subset of {0, ..., n-1}; doubles as Omega and as a sparsity
// support.
struct SupportSet {
    std::vector<std::uint32_t> indices;
    std::size_t n = 0;

    std::size_t size() const { return indices.size(); }
};

inline SupportSet make_support(std::vector<std::uint32_t> idx, std::size_t n) {
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= n || (i > 0 && idx[i] == idx[i - 1]))
            throw BadSupport("support indices must be unique and below n");
    }
    return SupportSet{std::move(idx), n};
}

inline SupportSet first_k_support(std::size_t n, std::size_t k) {
    if (k > n) throw BadSupport("support size exceeds ambient dimension");
    std::vector<std::uint32_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = static_cast<std::uint32_t>(i);
    return SupportSet{std::move(idx), n};
}

// Uniform k-subset of {0,...,n-1}: rejection sampling into a flag array.
inline SupportSet random_support(std::uint64_t seed, std::size_t n, std::size_t k) {
    if (k > n) throw BadSupport("support size exceeds ambient dimension");
    CounterRng rng(seed);
    std::vector<bool> used(n, false);
    std::vector<std::uint32_t> idx;
    idx.reserve(k);
    while (idx.size() < k) {
        const auto c = static_cast<std::uint32_t>(rng.next_below(n));
        if (!used[c]) {
            used[c] = true;
            idx.push_back(c);
        }
    }
    std::sort(idx.begin(), idx.end());
    return SupportSet{std::move(idx), n};
}

enum class Construction { Theorem1, Theorem2, GaussianBaseline, Custom };

struct SignDiagStage {
    SignVector signs;
};
struct TransformStage {
    FastTransformSpec spec;
};
struct SubsampleStage {
    SupportSet omega;
};
struct DenseProjectorStage {
    Matrix<double> rows;  // k x n, real
};

using Stage = std::variant<SignDiagStage, TransformStage, SubsampleStage, DenseProjectorStage>;

// A composed structured linear map. Stages are stored in application order
// (the rightmost factor of the written product comes first). All stages are
// exactly unitary n->n maps except a single terminal n->k stage; the global
// scalar (e.g. sqrt(n/k)) and the deferred transform normalizations live in
// `scale`.
struct OperatorChain {
    std::size_t n = 0;
    std::size_t k = 0;
    double scale = 1.0;
    std::vector<Stage> stages;
    Construction tag = Construction::Custom;

    bool requires_complex() const {
        for (const auto& st : stages) {
            if (const auto* t = std::get_if<TransformStage>(&st))
                if (t->spec.kind == TransformKind::DFT) return true;
        }
        return false;
    }
};

// A = sqrt(n/k) * R_Omega H D_eps H D_eps' H, with explicit sign vectors.
inline OperatorChain build_theorem1(std::size_t n, std::size_t k, SupportSet omega,
                                    SignVector eps, SignVector eps_prime,
                                    const FastTransformSpec& h) {
    if (k < 1 || k > n) throw BadSupport("need 1 <= k <= n");
    if (omega.size() != k) throw BadSupport("|omega| must equal k");
    if (omega.n != n || h.n != n) throw LengthMismatch("dimension mismatch in theorem-1 build");
    if (eps.signs.size() != n || eps_prime.signs.size() != n)
        throw LengthMismatch("sign vector length mismatch");
    OperatorChain c;
    c.n = n;
    c.k = k;
    c.scale = std::sqrt(static_cast<double>(n) / static_cast<double>(k));
    c.tag = Construction::Theorem1;
    c.stages = {TransformStage{h}, SignDiagStage{std::move(eps_prime)}, TransformStage{h},
                SignDiagStage{std::move(eps)}, TransformStage{h},
                SubsampleStage{std::move(omega)}};
    return c;
}

inline OperatorChain build_theorem1(std::size_t n, std::size_t k, SupportSet omega,
                                    std::uint64_t seed_eps, std::uint64_t seed_eps_prime,
                                    const FastTransformSpec& h) {
    return build_theorem1(n, k, std::move(omega), draw_sign_vector(seed_eps, n),
                          draw_sign_vector(seed_eps_prime, n), h);
}

// Parameters of the bootstrapped construction: kappa = C K sqrt(s k log n / n)
// must stay below 1/2, and r is the number of extra contraction rounds.
// Logs are natural throughout.
struct TheoremTwoPlan {
    std::size_t n = 0, k = 0, s = 0;
    double c_kappa = 1.0;
    double K = 1.0;
    double kappa = 0.0;
    int r = 0;
    std::vector<std::uint64_t> seeds;  // 2(r+1) entries: (eps, eps') per block
    std::uint64_t master_seed = 0;
    TransformKind transform = TransformKind::WalshHadamard;
};

struct PlanOptions {
    std::optional<double> kappa_override;
    bool enforce_regime = true;
    std::size_t s_min = 1;
};

inline TheoremTwoPlan plan_theorem2(std::size_t n, std::size_t k, std::size_t s,
                                    double c_kappa, const FastTransformSpec& h,
                                    std::uint64_t master_seed,
                                    const PlanOptions& opts = {}) {
    if (s < opts.s_min || k < 1 || k > n)
        throw DegenerateInput("need s >= s_min and 1 <= k <= n");
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    const double sd = static_cast<double>(s);
    const double logn = std::log(nd);
    if (opts.enforce_regime) {
        if (kd > std::sqrt(nd))
            throw RegimeViolation("k > sqrt(n) is outside the theorem-2 regime");
        if (sd * logn > kd)
            throw RegimeViolation("s log n > k is outside the theorem-2 regime");
    }
    double kappa = opts.kappa_override
                       ? *opts.kappa_override
                       : c_kappa * h.K * std::sqrt(sd * kd * logn / nd);
    if (!(kappa > 0.0) || kappa >= 0.5)
        throw KappaTooLarge("kappa = " + std::to_string(kappa) +
                            " must lie in (0, 1/2) for the bootstrap to contract");
    const double ratio = -std::log(2.0 * std::sqrt(nd / kd)) / std::log(kappa);
    const int r = std::max(1, static_cast<int>(std::ceil(ratio)));

    TheoremTwoPlan plan;
    plan.n = n;
    plan.k = k;
    plan.s = s;
    plan.c_kappa = c_kappa;
    plan.K = h.K;
    plan.kappa = kappa;
    plan.r = r;
    plan.master_seed = master_seed;
    plan.transform = h.kind;
    plan.seeds.reserve(2 * static_cast<std::size_t>(r + 1));
    for (int i = 1; i <= r + 1; ++i) {
        plan.seeds.push_back(derive_seed(master_seed, static_cast<std::uint64_t>(i),
                                         SeedRole::Epsilon));
        plan.seeds.push_back(derive_seed(master_seed, static_cast<std::uint64_t>(i),
                                         SeedRole::EpsilonPrime));
    }
    return plan;
}

// Base given as a dense k x n matrix; must satisfy P P* = (n/k) Id.
inline void check_scaled_orthonormal(const Matrix<double>& p, std::size_t n, std::size_t k) {
    if (p.rows != k || p.cols != n)
        throw LengthMismatch("base projector must be k x n");
    const double target = static_cast<double>(n) / static_cast<double>(k);
    double worst = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double g = 0.0;
            for (std::size_t c = 0; c < n; ++c) g += p(i, c) * p(j, c);
            const double want = (i == j) ? target : 0.0;
            worst = std::max(worst, std::abs(g - want));
        }
    }
    if (worst > 1e-8)
        throw BaseNotScaledOrthonormal("P P* deviates from (n/k) Id by " +
                                       std::to_string(worst));
}

namespace detail {

inline void append_theorem2_blocks(OperatorChain& c, const TheoremTwoPlan& plan,
                                   const FastTransformSpec& h) {
    // Written product: base * B_1 * ... * B_{r+1} with B_i = D_eps H D_eps' H.
    // Application order is B_{r+1} first, and within a block H comes first.
    for (int i = plan.r + 1; i >= 1; --i) {
        const auto eps_seed = plan.seeds[2 * static_cast<std::size_t>(i - 1)];
        const auto eps_prime_seed = plan.seeds[2 * static_cast<std::size_t>(i - 1) + 1];
        c.stages.push_back(TransformStage{h});
        c.stages.push_back(SignDiagStage{draw_sign_vector(eps_prime_seed, plan.n)});
        c.stages.push_back(TransformStage{h});
        c.stages.push_back(SignDiagStage{draw_sign_vector(eps_seed, plan.n)});
    }
}

}  // namespace detail

// A-hat = base * (r+1 unitary blocks), base = sqrt(n/k) R_Omega H.
inline OperatorChain build_theorem2(const TheoremTwoPlan& plan, SupportSet omega,
                                    const FastTransformSpec& h) {
    if (omega.size() != plan.k || omega.n != plan.n || h.n != plan.n)
        throw BadSupport("omega/transform dimensions do not match the plan");
    OperatorChain c;
    c.n = plan.n;
    c.k = plan.k;
    c.scale = std::sqrt(static_cast<double>(plan.n) / static_cast<double>(plan.k));
    c.tag = Construction::Theorem2;
    detail::append_theorem2_blocks(c, plan, h);
    c.stages.push_back(TransformStage{h});
    c.stages.push_back(SubsampleStage{std::move(omega)});
    return c;
}

inline OperatorChain build_theorem2(const TheoremTwoPlan& plan, Matrix<double> base,
                                    const FastTransformSpec& h) {
    check_scaled_orthonormal(base, plan.n, plan.k);
    if (h.n != plan.n) throw LengthMismatch("transform length does not match the plan");
    OperatorChain c;
    c.n = plan.n;
    c.k = plan.k;
    c.scale = 1.0;
    c.tag = Construction::Theorem2;
    detail::append_theorem2_blocks(c, plan, h);
    c.stages.push_back(DenseProjectorStage{std::move(base)});
    return c;
}

// Dense i.i.d. N(0, 1/k) comparison matrix, wrapped in the same chain shape.
inline OperatorChain build_gaussian_baseline(std::size_t n, std::size_t k,
                                             std::uint64_t seed) {
    if (k < 1 || k > n) throw BadSupport("need 1 <= k <= n");
    Matrix<double> p(k, n);
    CounterRng rng(derive_seed(seed, 0, SeedRole::Projector));
    const double sd = 1.0 / std::sqrt(static_cast<double>(k));
    for (auto& v : p.data) v = sd * rng.next_gaussian();
    OperatorChain c;
    c.n = n;
    c.k = k;
    c.scale = 1.0;
    c.tag = Construction::GaussianBaseline;
    c.stages = {DenseProjectorStage{std::move(p)}};
    return c;
}

// Replace every sign diagonal with fresh draws derived from `seed`,
// keeping Omega and the transform structure fixed. Used by the chaos
// statistics loop, which redraws (eps, eps') per trial.
inline OperatorChain redraw_signs(OperatorChain chain, std::uint64_t seed) {
    std::uint64_t idx = 0;
    for (auto& st : chain.stages) {
        if (auto* sd = std::get_if<SignDiagStage>(&st)) {
            const std::size_t len = sd->signs.signs.size();
            sd->signs = draw_sign_vector(derive_seed(seed, idx, SeedRole::Epsilon), len);
            ++idx;
        }
    }
    return chain;
}

template <class T>
std::vector<T> apply_chain(const OperatorChain& chain, const std::vector<T>& x,
                           Direction dir) {
    if constexpr (!is_complex_v<T>) {
        if (chain.requires_complex())
            throw FieldMismatch("chain contains a DFT stage; use a complex vector");
    }
    double running = chain.scale;
    std::vector<T> v = x;

    auto apply_sign = [](std::vector<T>& vec, const SignVector& s) {
        if (vec.size() != s.signs.size()) throw LengthMismatch("sign diagonal length");
        for (std::size_t i = 0; i < vec.size(); ++i) vec[i] *= s.signs[i];
        opcount::add(vec.size());
    };

    if (dir == Direction::Forward) {
        if (x.size() != chain.n) throw LengthMismatch("forward input must have length n");
        for (const auto& st : chain.stages) {
            std::visit(
                [&](const auto& stage) {
                    using S = std::decay_t<decltype(stage)>;
                    if constexpr (std::is_same_v<S, SignDiagStage>) {
                        apply_sign(v, stage.signs);
                    } else if constexpr (std::is_same_v<S, TransformStage>) {
                        running *= apply_transform_raw(stage.spec, v, Direction::Forward);
                    } else if constexpr (std::is_same_v<S, SubsampleStage>) {
                        std::vector<T> out(stage.omega.size());
                        for (std::size_t i = 0; i < out.size(); ++i)
                            out[i] = v[stage.omega.indices[i]];
                        v = std::move(out);
                    } else {
                        std::vector<T> out(stage.rows.rows, T{});
                        for (std::size_t i = 0; i < stage.rows.rows; ++i) {
                            T acc{};
                            for (std::size_t j = 0; j < stage.rows.cols; ++j)
                                acc += stage.rows(i, j) * v[j];
                            out[i] = acc;
                        }
                        opcount::add(2 * stage.rows.rows * stage.rows.cols);
                        v = std::move(out);
                    }
                },
                st);
        }
    } else {
        if (x.size() != chain.k) throw LengthMismatch("adjoint input must have length k");
        for (auto it = chain.stages.rbegin(); it != chain.stages.rend(); ++it) {
            std::visit(
                [&](const auto& stage) {
                    using S = std::decay_t<decltype(stage)>;
                    if constexpr (std::is_same_v<S, SignDiagStage>) {
                        apply_sign(v, stage.signs);
                    } else if constexpr (std::is_same_v<S, TransformStage>) {
                        running *= apply_transform_raw(stage.spec, v, Direction::Adjoint);
                    } else if constexpr (std::is_same_v<S, SubsampleStage>) {
                        std::vector<T> out(stage.omega.n, T{});
                        for (std::size_t i = 0; i < stage.omega.size(); ++i)
                            out[stage.omega.indices[i]] = v[i];
                        v = std::move(out);
                    } else {
                        std::vector<T> out(stage.rows.cols, T{});
                        for (std::size_t i = 0; i < stage.rows.rows; ++i)
                            for (std::size_t j = 0; j < stage.rows.cols; ++j)
                                out[j] += stage.rows(i, j) * v[i];
                        opcount::add(2 * stage.rows.rows * stage.rows.cols);
                        v = std::move(out);
                    }
                },
                *it);
        }
    }
    if (running != 1.0) {
        for (auto& e : v) e *= running;
        opcount::add(v.size());
    }
    return v;
}

template <class T>
Matrix<T> materialize_chain(const OperatorChain& chain) {
    if (chain.n > kMaterializeCap)
        throw SizeGuard("refusing to materialize chain of dimension " +
                        std::to_string(chain.n));
    Matrix<T> m(chain.k, chain.n);
    std::vector<T> e(chain.n);
    for (std::size_t j = 0; j < chain.n; ++j) {
        std::fill(e.begin(), e.end(), T{});
        e[j] = T{1};
        const auto col = apply_chain(chain, e, Direction::Forward);
        for (std::size_t i = 0; i < chain.k; ++i) m(i, j) = col[i];
    }
    return m;
}

}  // namespace fastrip
