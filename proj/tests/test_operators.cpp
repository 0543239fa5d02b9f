#include <catch2/catch_amalgamated.hpp>

#include "fastrip/fastrip.hpp"
#include "oracles.hpp"

using namespace fastrip;
using Catch::Approx;

TEST_CASE("sign vectors are deterministic and unbiased") {
    const auto a = draw_sign_vector(7, 8);
    const auto b = draw_sign_vector(7, 8);
    CHECK(a.signs == b.signs);

    // D_eps applied twice is the identity
    auto x = oracles::random_unit_vector(8, 1);
    auto y = x;
    for (std::size_t i = 0; i < 8; ++i) y[i] *= a.signs[i];
    for (std::size_t i = 0; i < 8; ++i) y[i] *= a.signs[i];
    CHECK(y == x);

    const std::size_t n = std::size_t{1} << 20;
    const auto big = draw_sign_vector(123, n);
    double mean = 0.0;
    for (const double v : big.signs) mean += v;
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean) < 0.005);
}

TEST_CASE("support sets validate") {
    CHECK_THROWS_AS(make_support({1, 1, 2}, 8), BadSupport);
    CHECK_THROWS_AS(make_support({9}, 8), BadSupport);
    const auto s = make_support({5, 1, 3}, 8);
    CHECK(s.indices == std::vector<std::uint32_t>{1, 3, 5});
    const auto r = random_support(3, 100, 10);
    CHECK(r.size() == 10);
    CHECK(std::is_sorted(r.indices.begin(), r.indices.end()));
}

TEST_CASE("theorem-1 chain with forced all-ones signs reduces to subsampled WHT") {
    const std::size_t n = 16, k = 4;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    const auto chain = build_theorem1(n, k, first_k_support(n, k), all_ones_signs(n),
                                      all_ones_signs(n), h);
    // H^3 = H for the WHT, so the chain is sqrt(n/k) R_Omega H
    const auto hm = oracles::explicit_transform_matrix(TransformKind::WalshHadamard, n);
    const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(k));
    const auto dense = materialize_chain<double>(chain);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < n; ++j)
            CHECK(std::abs(dense(i, j) - scale * hm(i, j).real()) < 1e-10);
}

TEST_CASE("theorem-1 chain has unit mean squared norm") {
    const std::size_t n = 16, k = 4;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    const auto base = build_theorem1(n, k, first_k_support(n, k), 1, 2, h);
    double sum = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        const auto chain = redraw_signs(base, derive_seed(50, t, SeedRole::Trial));
        CounterRng rng(derive_seed(51, t, SeedRole::Coefficients));
        const auto x = detail::random_sparse_unit<double>(rng, n, 2);
        const double nrm = norm2(apply_chain(chain, x, Direction::Forward));
        sum += nrm * nrm;
    }
    CHECK(sum / trials == Approx(1.0).margin(0.03));
}

TEST_CASE("full sampling gives an exact isometry") {
    const std::size_t n = 8;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    const auto chain = build_theorem1(n, n, first_k_support(n, n), 3, 4, h);
    for (int t = 0; t < 20; ++t) {
        const auto x = oracles::random_unit_vector(n, 100 + t);
        CHECK(norm2(apply_chain(chain, x, Direction::Forward)) == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("theorem-2 plan evaluates r from the contraction formula") {
    const auto h = make_transform(TransformKind::WalshHadamard, 4096);
    PlanOptions opts;
    opts.kappa_override = 0.25;
    opts.enforce_regime = false;
    const auto plan = plan_theorem2(4096, 64, 4, 1.0, h, 7, opts);
    CHECK(plan.r == 2);  // ceil(ln 16 / ln 4)
    CHECK(plan.kappa == 0.25);
    CHECK(plan.seeds.size() == 2 * static_cast<std::size_t>(plan.r + 1));

    const auto h2 = make_transform(TransformKind::WalshHadamard, 64);
    PlanOptions opts2;
    opts2.kappa_override = 0.499;
    opts2.enforce_regime = false;
    const auto plan2 = plan_theorem2(64, 64, 1, 1.0, h2, 7, opts2);
    CHECK(plan2.r == 1);  // ceil(-ln 2 / ln 0.499), floored at 1

    // kappa = sqrt(8 * 40 * ln 1024 / 1024) > 1/2
    const auto h3 = make_transform(TransformKind::WalshHadamard, 1024);
    PlanOptions opts3;
    opts3.enforce_regime = false;
    CHECK_THROWS_AS(plan_theorem2(1024, 40, 8, 1.0, h3, 7, opts3), KappaTooLarge);
}

TEST_CASE("theorem-2 plan regime checks") {
    const auto h = make_transform(TransformKind::WalshHadamard, 1024);
    PlanOptions strict;
    strict.kappa_override = 0.3;
    CHECK_THROWS_AS(plan_theorem2(1024, 512, 2, 1.0, h, 7, strict), RegimeViolation);
    CHECK_THROWS_AS(plan_theorem2(1024, 8, 4, 1.0, h, 7, strict), RegimeViolation);
    PlanOptions lax = strict;
    lax.enforce_regime = false;
    CHECK_NOTHROW(plan_theorem2(1024, 8, 4, 1.0, h, 7, lax));
}

TEST_CASE("theorem-2 chain preserves scaled row orthonormality") {
    for (const std::size_t n : {32u, 64u}) {
        const std::size_t k = n / 4;
        const auto h = make_transform(TransformKind::WalshHadamard, n);
        PlanOptions opts;
        opts.kappa_override = 0.25;
        opts.enforce_regime = false;
        const auto plan = plan_theorem2(n, k, 2, 1.0, h, 42, opts);
        const auto chain = build_theorem2(plan, first_k_support(n, k), h);

        int sign_stages = 0;
        for (const auto& st : chain.stages)
            if (std::holds_alternative<SignDiagStage>(st)) ++sign_stages;
        CHECK(sign_stages == 2 * (plan.r + 1));

        const auto m = materialize_chain<double>(chain);
        const double target = static_cast<double>(n) / static_cast<double>(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                double g = 0.0;
                for (std::size_t c = 0; c < n; ++c) g += m(i, c) * m(j, c);
                CHECK(std::abs(g - (i == j ? target : 0.0)) < 1e-8);
            }
        // every row has length sqrt(n/k)
        for (std::size_t i = 0; i < k; ++i) {
            double r2 = 0.0;
            for (std::size_t c = 0; c < n; ++c) r2 += m(i, c) * m(i, c);
            CHECK(std::sqrt(r2) == Approx(std::sqrt(target)).margin(1e-8));
        }
    }
}

TEST_CASE("theorem-2 chain has unit mean squared norm on sparse vectors") {
    const std::size_t n = 32, k = 8, s = 2;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    PlanOptions opts;
    opts.kappa_override = 0.25;
    opts.enforce_regime = false;
    const auto plan = plan_theorem2(n, k, s, 1.0, h, 9, opts);
    const auto base = build_theorem2(plan, first_k_support(n, k), h);
    double sum = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        const auto chain = redraw_signs(base, derive_seed(60, t, SeedRole::Trial));
        CounterRng rng(derive_seed(61, t, SeedRole::Coefficients));
        const auto x = detail::random_sparse_unit<double>(rng, n, s);
        const double nrm = norm2(apply_chain(chain, x, Direction::Forward));
        sum += nrm * nrm;
    }
    CHECK(sum / trials == Approx(1.0).margin(0.05));
}

TEST_CASE("theorem-2 rejects a base that is not scaled-orthonormal") {
    const std::size_t n = 16, k = 4;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    PlanOptions opts;
    opts.kappa_override = 0.25;
    opts.enforce_regime = false;
    const auto plan = plan_theorem2(n, k, 2, 1.0, h, 5, opts);
    Matrix<double> bad(k, n);
    for (std::size_t i = 0; i < k; ++i) bad(i, i) = 1.0;  // rows too short
    CHECK_THROWS_AS(build_theorem2(plan, bad, h), BaseNotScaledOrthonormal);

    Matrix<double> good(k, n);
    const double len = std::sqrt(static_cast<double>(n) / static_cast<double>(k));
    for (std::size_t i = 0; i < k; ++i) good(i, i) = len;
    CHECK_NOTHROW(build_theorem2(plan, good, h));
}

TEST_CASE("apply_chain adjoint matches forward") {
    const std::size_t n = 64, k = 16;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    const auto chain = build_theorem1(n, k, first_k_support(n, k), 8, 9, h);
    CounterRng rng(77);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x(n), y(k);
        for (auto& v : x) v = rng.next_gaussian();
        for (auto& v : y) v = rng.next_gaussian();
        const auto ax = apply_chain(chain, x, Direction::Forward);
        const auto aty = apply_chain(chain, y, Direction::Adjoint);
        CHECK(std::abs(inner(ax, y) - inner(x, aty)) <= 1e-10 * norm2(x) * norm2(y));
    }
    const std::vector<double> zero(n, 0.0);
    for (const double v : apply_chain(chain, zero, Direction::Forward)) CHECK(v == 0.0);
}

TEST_CASE("apply_chain agrees with the explicit dense composition") {
    const std::size_t n = 32, k = 8;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    const auto chain = build_theorem1(n, k, first_k_support(n, k), 21, 22, h);
    const auto dense = oracles::explicit_chain_matrix(chain);
    const auto x = oracles::random_unit_vector(n, 17);
    const auto fast = apply_chain(chain, x, Direction::Forward);
    std::vector<std::complex<double>> xc(x.begin(), x.end());
    const auto slow = dense.matvec(xc);
    for (std::size_t i = 0; i < k; ++i) CHECK(std::abs(fast[i] - slow[i]) < 1e-8);
}

TEST_CASE("materialization columns equal chain application") {
    const std::size_t n = 16, k = 8;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    const auto chain = build_theorem1(n, k, first_k_support(n, k), 31, 32, h);
    const auto m = materialize_chain<double>(chain);
    std::vector<double> e3(n, 0.0);
    e3[3] = 1.0;
    const auto col = apply_chain(chain, e3, Direction::Forward);
    for (std::size_t i = 0; i < k; ++i) CHECK(m(i, 3) == col[i]);  // bitwise

    const auto unitary = build_theorem1(8, 8, first_k_support(8, 8), 1, 2,
                                        make_transform(TransformKind::WalshHadamard, 8));
    const auto mu = materialize_chain<double>(unitary);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            double g = 0.0;
            for (std::size_t c = 0; c < 8; ++c) g += mu(i, c) * mu(j, c);
            CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-10);
        }
}

TEST_CASE("recipes rebuild bitwise-identical chains") {
    ChainRecipe r;
    r.construction = Construction::Theorem2;
    r.transform = TransformKind::WalshHadamard;
    r.n = 64;
    r.k = 16;
    r.s = 2;
    r.kappa_override = 0.3;
    r.seed = 4242;
    const auto a = materialize_chain<double>(build_chain(r));
    const auto b = materialize_chain<double>(build_chain(r));
    CHECK(a.data == b.data);

    const auto text = emit_chain_spec(r);
    const auto reparsed = parse_chain_spec(text);
    CHECK(emit_chain_spec(reparsed) == text);
    const auto c = materialize_chain<double>(build_chain(reparsed));
    CHECK(a.data == c.data);

    CHECK_THROWS_AS(parse_chain_spec("bogus_key = 3\n"), ConfigParse);
}

TEST_CASE("gaussian baseline builds and estimates") {
    const auto chain = build_gaussian_baseline(16, 8, 77);
    CHECK(chain.n == 16);
    CHECK(chain.k == 8);
    const auto est = exact_rip_constant(materialize_chain<double>(chain), 2);
    CHECK(est.delta > 0.0);
    CHECK(est.delta < 2.0);
}

TEST_CASE("op counts match the instrumented kernels") {
    const std::size_t n = 1024, k = 64;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    const auto chain = build_theorem1(n, k, first_k_support(n, k), 1, 2, h);
    const std::uint64_t expected = 3 * n * 10 + 2 * n + k;
    CHECK(count_operations(chain) == expected);

    std::vector<double> x(n, 1.0);
    opcount::Scope scope;
    (void)apply_chain(chain, x, Direction::Forward);
    CHECK(scope.count() == expected);
}

TEST_CASE("theorem-2 op counts scale with the block count") {
    const std::size_t n = 4096, k = 64;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    PlanOptions opts;
    opts.kappa_override = 0.25;
    opts.enforce_regime = false;
    const auto plan = plan_theorem2(n, k, 4, 1.0, h, 7, opts);
    REQUIRE(plan.r == 2);
    const auto chain = build_theorem2(plan, first_k_support(n, k), h);
    int transforms = 0;
    for (const auto& st : chain.stages)
        if (std::holds_alternative<TransformStage>(st)) ++transforms;
    CHECK(transforms == 2 * (plan.r + 1) + 1);

    std::vector<double> x(n, 1.0);
    opcount::Scope scope;
    (void)apply_chain(chain, x, Direction::Forward);
    CHECK(scope.count() == count_operations(chain));
}
