#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "fastrip/fastrip.hpp"
#include "oracles.hpp"

using namespace fastrip;
using Catch::Approx;

TEST_CASE("exact RIP constant on hand-computed matrices") {
    // The 4x4 identity is a perfect isometry at every sparsity.
    Matrix<double> id(4, 4);
    for (std::size_t i = 0; i < 4; ++i) id(i, i) = 1.0;
    const auto est = exact_rip_constant(id, 2);
    CHECK(est.delta == Approx(0.0).margin(1e-12));
    CHECK(est.delta_squared == Approx(0.0).margin(1e-12));

    // sqrt(2) * [e0^T; e1^T] as a 2x4 matrix: columns 2 and 3 are zero, so
    // delta_1 = 1 and the worst support is a zero column.
    Matrix<double> a(2, 4);
    a(0, 0) = std::sqrt(2.0);
    a(1, 1) = std::sqrt(2.0);
    const auto est1 = exact_rip_constant(a, 1);
    CHECK(est1.delta == Approx(1.0).margin(1e-12));
    REQUIRE(est1.witness_support.has_value());
    CHECK(est1.witness_support->indices == std::vector<std::uint32_t>{2});
}

TEST_CASE("Jacobi singular values agree with the power-iteration oracle") {
    Matrix<double> id3(3, 3);
    for (std::size_t i = 0; i < 3; ++i) id3(i, i) = 1.0;
    const auto [a_min, a_max] = extremal_singular_values(id3);
    CHECK(a_min == Approx(1.0).margin(1e-12));
    CHECK(a_max == Approx(1.0).margin(1e-12));

    Matrix<double> d(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 0.5;
    const auto [b_min, b_max] = extremal_singular_values(d);
    CHECK(b_min == Approx(0.5).margin(1e-12));
    CHECK(b_max == Approx(2.0).margin(1e-12));

    CounterRng rng(13);
    Matrix<double> r(8, 3);
    for (auto& v : r.data) v = rng.next_gaussian();
    const auto [j_min, j_max] = extremal_singular_values(r);
    const auto [p_min, p_max] = oracles::power_singular_values(r, 19);
    CHECK(j_min == Approx(p_min).margin(1e-8));
    CHECK(j_max == Approx(p_max).margin(1e-8));
}

TEST_CASE("exact enumeration matches the brute-force oracle") {
    const auto chain = build_gaussian_baseline(12, 6, 31);
    const auto dense = materialize_chain<double>(chain);
    const auto est = exact_rip_constant(dense, 2);
    CHECK(est.delta == Approx(oracles::brute_force_rip(dense, 2, 23)).margin(1e-7));
}

TEST_CASE("Monte Carlo estimates lower-bound the exact constant") {
    const std::size_t n = 16, k = 8, s = 2;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    const auto chain = build_theorem1(n, k, first_k_support(n, k), 41, 42, h);
    const auto exact = exact_rip_constant(materialize_chain<double>(chain), s);
    const auto mc = monte_carlo_rip(chain, s, 2000, 5);
    CHECK(mc.delta <= exact.delta + 1e-12);
    CHECK(mc.delta_squared <= exact.delta_squared + 1e-12);

    // More trials extend fewer trials under the same seed: monotone in trials.
    const auto mc_small = monte_carlo_rip(chain, s, 200, 5);
    CHECK(mc_small.delta <= mc.delta + 1e-15);
    CHECK(mc.witness_vector.size() == n);
}

TEST_CASE("chaos statistics at full sampling are exactly one") {
    const std::size_t n = 16;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    const auto chain = build_theorem1(n, n, first_k_support(n, n), 1, 2, h);
    const auto x = oracles::random_unit_vector(n, 3);
    const auto st = chaos_statistics(chain, x, 200, 9);
    CHECK(st.mean_alpha_sq == Approx(1.0).margin(1e-10));
    CHECK(st.variance == Approx(0.0).margin(1e-10));
    for (const double a : st.alphas) CHECK(a == Approx(1.0).margin(1e-10));
}

TEST_CASE("chaos mean and tails behave at moderate subsampling") {
    const std::size_t n = 64, k = 16;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    const auto chain = build_theorem1(n, k, first_k_support(n, k), 1, 2, h);
    std::vector<double> e0(n, 0.0);
    e0[0] = 1.0;
    const auto st = chaos_statistics(chain, e0, 10000, 17);
    CHECK(st.mean_alpha_sq == Approx(1.0).margin(0.03));
    // Tail quantiles are nondecreasing in the level.
    CHECK(st.quantiles.at(0.5) <= st.quantiles.at(0.9));
    CHECK(st.quantiles.at(0.9) <= st.quantiles.at(0.99));
    CHECK(st.quantiles.at(0.99) <= st.quantiles.at(0.999));
    CHECK(st.median_alpha == st.quantiles.at(0.5));
}

TEST_CASE("chaos concentration tightens as k grows") {
    const std::size_t n = 1024;
    const auto h = make_transform(TransformKind::WalshHadamard, n);
    const auto x = oracles::random_unit_vector(n, 8);
    double prev = std::numeric_limits<double>::infinity();
    for (const std::size_t k : {32u, 64u, 128u}) {
        const auto chain = build_theorem1(n, k, first_k_support(n, k), 1, 2, h);
        const auto st = chaos_statistics(chain, x, 400, 23);
        CHECK(st.variance < prev);
        prev = st.variance;
    }
}

TEST_CASE("separated nets in small dimensions") {
    // On the unit circle in R^1 the sphere is {-1, +1}.
    const auto n1 = build_separated_net(1, 0.1, 7);
    REQUIRE(n1.points.size() == 2);
    CHECK(n1.maximal);
    CHECK(std::abs(std::abs(n1.points[0][0]) - 1.0) < 1e-12);
    CHECK(n1.points[0][0] == Approx(-n1.points[1][0]));

    // Near-diameter separation admits at most two points.
    const auto wide = build_separated_net(2, 1.999, 11);
    CHECK(wide.points.size() <= 2);

    const auto n3 = build_separated_net(3, 0.5, 13);
    CHECK(n3.maximal);
    // (1 + 2/mu)^{2m} cardinality bound
    CHECK(static_cast<double>(n3.points.size()) <= std::pow(1.0 + 2.0 / 0.5, 6.0));
    // Pairwise separation holds.
    for (std::size_t i = 0; i < n3.points.size(); ++i)
        for (std::size_t j = i + 1; j < n3.points.size(); ++j) {
            double d_sq = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                const double diff = n3.points[i][c] - n3.points[j][c];
                d_sq += diff * diff;
            }
            CHECK(std::sqrt(d_sq) > 0.5);
        }
    // Maximality implies covering: fresh unit probes sit within mu of the net.
    for (int t = 0; t < 200; ++t) {
        const auto probe = oracles::random_unit_vector(3, 1000 + t);
        CHECK(net_covering_distance(n3, probe) <= 0.5 + 1e-9);
    }
}

TEST_CASE("block decomposition splits by decreasing magnitude") {
    const std::vector<double> w = {0.1, -3.0, 2.0, 0.0, 1.0, -1.0};
    const auto blocks = block_decompose(w, 2);
    REQUIRE(blocks.size() == 3);
    // Block 0 carries the two largest entries.
    CHECK(blocks[0][1] == -3.0);
    CHECK(blocks[0][2] == 2.0);
    // Ties between |1.0| and |-1.0| resolve to the lower index.
    CHECK(blocks[1][4] == 1.0);
    CHECK(blocks[1][5] == -1.0);
    CHECK(blocks[2][0] == 0.1);
    // Blocks are disjoint and sum to w.
    std::vector<double> sum(w.size(), 0.0);
    for (const auto& b : blocks)
        for (std::size_t i = 0; i < w.size(); ++i) sum[i] += b[i];
    CHECK(sum == w);
}

TEST_CASE("block norms sum to at most twice the bound") {
    // Draw w, then pick s so that ||w||_1 <= sqrt(s) ||w||_2 holds with
    // rho = ||w||_2; the lemma then promises sum ||w^(i)|| <= 2 rho.
    CounterRng rng(29);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 8 + (t % 57);
        std::vector<double> w(n);
        for (auto& v : w) v = rng.next_gaussian();
        const double rho = norm2(w);
        const double l1 = norm1(w);
        const auto s = static_cast<std::size_t>(std::ceil((l1 / rho) * (l1 / rho)));
        const auto blocks = block_decompose(w, s);
        double total = 0.0;
        for (const auto& b : blocks) total += norm2(b);
        CHECK(total <= 2.0 * rho + 1e-12);
    }
}

TEST_CASE("RIP estimates are invariant to support relabeling") {
    // Permuting columns or flipping their signs changes no singular value of
    // any column submatrix family, so delta_s is unchanged.
    const auto chain = build_gaussian_baseline(12, 6, 47);
    const auto dense = materialize_chain<double>(chain);
    Matrix<double> permuted(dense.rows, dense.cols);
    const std::size_t n = dense.cols;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = (5 * i + 3) % n;
    for (std::size_t i = 0; i < dense.rows; ++i)
        for (std::size_t j = 0; j < n; ++j)
            permuted(i, perm[j]) = (j % 2 ? -1.0 : 1.0) * dense(i, j);
    const auto base = exact_rip_constant(dense, 2);
    const auto flip = exact_rip_constant(permuted, 2);
    CHECK(flip.delta == Approx(base.delta).margin(1e-10));
}

TEST_CASE("complex chains route through the Hermitian embedding") {
    const std::size_t n = 16, k = 8;
    const auto f = make_transform(TransformKind::DFT, n);
    const auto chain = build_theorem1(n, k, first_k_support(n, k), 3, 4, f);
    REQUIRE(chain.requires_complex());
    const auto dense = materialize_chain<std::complex<double>>(chain);
    const auto est = exact_rip_constant(dense, 2);
    CHECK(est.delta >= 0.0);
    const auto mc = monte_carlo_rip(chain, 2, 500, 7);
    CHECK(mc.delta <= est.delta + 1e-12);
}

TEST_CASE("estimator error paths") {
    const auto chain = build_gaussian_baseline(64, 16, 3);
    const auto dense = materialize_chain<double>(chain);
    CHECK_THROWS_AS(exact_rip_constant(dense, 16), TooManySupports);
    CHECK_THROWS_AS(exact_rip_constant(dense, 0), DegenerateInput);
    CHECK_THROWS_AS(monte_carlo_rip(chain, 0, 100, 1), DegenerateInput);
    CHECK_THROWS_AS(monte_carlo_rip(chain, 2, 0, 1), DegenerateInput);

    std::vector<double> not_unit(64, 0.5);
    CHECK_THROWS_AS(chaos_statistics(chain, not_unit, 200, 1), NotUnitNorm);
    std::vector<double> e0(64, 0.0);
    e0[0] = 1.0;
    CHECK_THROWS_AS(chaos_statistics(chain, e0, 50, 1), DegenerateInput);

    CHECK_THROWS_AS(build_separated_net(0, 0.5, 1), DegenerateInput);
    CHECK_THROWS_AS(build_separated_net(2, 2.5, 1), DegenerateInput);
    CHECK_THROWS_AS(block_decompose(std::vector<double>{1.0}, 0), DegenerateInput);
}
