#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "honeyvol/yangmills.hpp"

using namespace hv;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_SUITE("yangmills") {

TEST_CASE("circle heat kernel: positivity, symmetry, normalization, crossover") {
    CHECK_THROWS_AS(circle_heat_kernel(0.0, 0.1, 0.2), NonpositiveTime);
    for (double T : {0.05, 0.4, 1.7}) {
        CHECK(circle_heat_kernel(T, 0.3, 2.1) ==
              doctest::Approx(circle_heat_kernel(T, 2.1, 0.3)).epsilon(1e-14));
        // periodic trapezoid rule converges exponentially
        const int M = 4096;
        double mass = 0;
        for (int i = 0; i < M; ++i)
            mass += circle_heat_kernel(T, 0.3, 2 * kPi * i / M) * (2 * kPi / M);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    }
    // the summation strategy switches at T = 1; values must agree there
    CHECK(circle_heat_kernel(1.0 - 1e-12, 0.2, 1.3) ==
          doctest::Approx(circle_heat_kernel(1.0 + 1e-12, 0.2, 1.3)).epsilon(1e-9));
}

TEST_CASE("weight dimension and casimir on known weights") {
    CHECK(ydetail::weight_dimension({1, 0, 0}) == doctest::Approx(3));
    CHECK(ydetail::weight_dimension({1, 1, 0}) == doctest::Approx(3));
    CHECK(ydetail::weight_dimension({2, 0, 0}) == doctest::Approx(6));
    CHECK(ydetail::weight_dimension({1, 1, 1}) == doctest::Approx(1));
    CHECK(ydetail::weight_casimir({1, 0, 0}) == doctest::Approx(3));
    CHECK(ydetail::weight_casimir({1, 1, 1}) == doctest::Approx(3));
    CHECK(ydetail::weight_casimir({0, 0, 0}) == doctest::Approx(0));
}

TEST_CASE("character generalizes the trace on the defining weight") {
    auto a = parse_angles("7/10,4/10,1/10");
    auto tr = ydetail::weyl_character({1, 0, 0}, a);
    std::complex<double> expect = 0;
    for (double x : a.vals()) expect += std::exp(std::complex<double>(0, 2 * kPi * x));
    CHECK(std::abs(tr - expect) < 1e-10);
    // near the identity the modulus approaches the dimension (the U(n)
    // determinant factor contributes a genuine first-order phase)
    auto c0 = ydetail::weyl_character({2, 1, 0}, parse_angles("3/1000,2/1000,1/1000"));
    CHECK(std::abs(std::abs(c0) - ydetail::weight_dimension({2, 1, 0})) < 1e-3);
}

TEST_CASE("transition density: determinant route equals the character series") {
    auto x = parse_angles("8/10,5/10,1/10");
    auto y = parse_angles("7/10,4/10,2/10");
    double T = 0.6;
    double det_route = dyson_kernel(T, x, y);  // odd n dispatches to the determinant
    double series = 0;
    for (int r = 0; r <= 14; ++r) {
        std::vector<std::vector<int>> ws;
        ydetail::shell_weights(3, r, &ws);
        for (const auto& lam : ws)
            series += (ydetail::weyl_character(lam, x) *
                       std::conj(ydetail::weyl_character(lam, y)))
                          .real() *
                      std::exp(-T * ydetail::weight_casimir(lam) / 2);
    }
    series *= std::pow(vandermonde(y), 2);
    CHECK(det_route == doctest::Approx(series).epsilon(1e-9));
}

TEST_CASE("transition density satisfies detailed balance") {
    auto x = parse_angles("8/10,5/10,1/10");
    auto y = parse_angles("7/10,4/10,2/10");
    for (double T : {0.3, 1.1}) {
        double lhs = dyson_kernel(T, x, y) * std::pow(vandermonde(x), 2);
        double rhs = dyson_kernel(T, y, x) * std::pow(vandermonde(y), 2);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("lattice series: closed sphere value and monotonicity in area") {
    // closed sphere, n = 2: sum over weight shells of dim^2 e^{-T c2 / 2}
    double direct = 0;
    for (int r = 0; r <= 40; ++r) {
        std::vector<std::vector<int>> ws;
        ydetail::shell_weights(2, r, &ws);
        for (const auto& lam : ws) {
            double d = ydetail::weight_dimension(lam);
            direct += d * d * std::exp(-0.8 * ydetail::weight_casimir(lam) / 2);
        }
    }
    CHECK(lattice_oracle(2, 0, 0, 0.8, {}) == doctest::Approx(direct).epsilon(1e-5));
    CHECK(lattice_oracle(2, 2, 0, 0.5, {}) > lattice_oracle(2, 2, 0, 1.0, {}));
    CHECK_THROWS_AS(lattice_oracle(2, 0, 0, 1e-4, {}, 4), TruncationInsufficient);
}

TEST_CASE("haar samples are unitary and the product classes are standardized") {
    Rng rng(3, 5);
    auto U = haar_unitary(3, rng);
    Eigen::MatrixXcd I = U * U.adjoint();
    CHECK((I - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-12);

    auto a = parse_angles("7/10,4/10,1/10");
    auto b = parse_angles("8/10,5/10,2/10");
    auto s1 = orbit_product_sampler(a, b, 50, 12);
    auto s2 = orbit_product_sampler(a, b, 50, 12);
    REQUIRE(s1.size() == 50);
    CHECK(s1 == s2);
    for (const auto& g : s1) {
        REQUIRE(g.size() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(g[i] >= 0.0);
            CHECK(g[i] < 1.0);
            if (i) CHECK(g[i - 1] >= g[i]);
        }
    }
}

TEST_CASE("loop tree validation") {
    LoopTree t;
    t.vertices = {{0, 0.5, 0}, {1, 0.7, 0}};
    t.edges = {{0, 1, parse_angles("7/10,4/10,1/10")}};
    CHECK_NOTHROW(validate_tree(t, 3));

    LoopTree dup = t;
    dup.vertices[1].id = 0;
    CHECK_THROWS_AS(validate_tree(dup, 3), InvalidTree);

    LoopTree disc = t;
    disc.vertices.push_back({2, 0.1, 0});
    CHECK_THROWS_AS(validate_tree(disc, 3), InvalidTree);

    CHECK_THROWS_AS(validate_tree(t, 4), InvalidTree);  // label size mismatch
}

TEST_CASE("two vertex loop tree marginal is finite and positive") {
    LoopTree t;
    t.vertices = {{0, 0.6, 0}, {1, 0.9, 0}};
    t.edges = {{0, 1, parse_angles("7/10,4/10,1/10")}};
    YmOptions opt;
    opt.seed = 2;
    auto est = ym_marginal(t, 3, opt);
    CHECK(std::isfinite(est.value));
    CHECK(est.value > 0);
}

}  // TEST_SUITE
