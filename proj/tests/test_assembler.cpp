#include <doctest.h>

#include <cmath>

#include "honeyvol/assembler.hpp"

using namespace hv;

TEST_SUITE("assembler") {

TEST_CASE("surface validation catches malformed gluing data") {
    CHECK_THROWS_AS(pants_surface(0, 2), InvalidTopology);

    SurfaceSpec s = pants_surface(0, 4);
    CHECK_NOTHROW(validate_surface(s));
    CHECK_NOTHROW(validate_surface(four_holed_sphere_alt()));

    SurfaceSpec bad = s;
    bad.p = 3;  // boundary count no longer matches N = p + 2g - 2
    CHECK_THROWS_AS(validate_surface(bad), InvalidTopology);

    bad = s;
    bad.boundaries[1] = bad.boundaries[0];  // slot used twice
    CHECK_THROWS_AS(validate_surface(bad), InvalidTopology);

    bad = s;
    bad.gluings[0] = {bad.boundaries[0], bad.boundaries[1]};  // disconnects
    CHECK_THROWS_AS(validate_surface(bad), InvalidTopology);
}

TEST_CASE("canonical decompositions exist for small genus and boundary counts") {
    for (int g = 0; g <= 2; ++g)
        for (int p = 0; p <= 4; ++p) {
            if (p + 2 * g - 2 < 1) continue;
            auto s = pants_surface(g, p);
            CHECK(s.N == p + 2 * g - 2);
            CHECK(static_cast<int>(s.gluings.size()) == (3 * s.N - p) / 2);
        }
}

TEST_CASE("non integral color number is reported as not solvable") {
    auto a = parse_angles("14/23,7/23,2/23");
    auto b = parse_angles("18/23,10/23,3/23");
    auto c = parse_angles("19/23,10/23,2/23");  // without the flip: sum 85/23
    auto r = z03(a, b, c);
    CHECK_FALSE(r.solvable);
    CHECK(r.value == 0.0);
}

TEST_CASE("triangle constant at unit calibration") {
    double pi = 3.14159265358979323846;
    // n = 3: 2^((n+1) mod 2) (2 pi)^((n-1)(n-2)) / n!
    CHECK(c03_constant(3, 1.0) == doctest::Approx(4 * pi * pi / 6));
    CHECK(c03_constant(4, 1.0) == doctest::Approx(2 * std::pow(2 * pi, 6) / 24));
}

TEST_CASE("prefactor combines calibration, class count and boundary vandermondes") {
    auto a = parse_angles("14/23,7/23,2/23");
    auto b = parse_angles("18/23,10/23,3/23");
    auto c = tilde(parse_angles("19/23,10/23,2/23"));
    ZOptions opt;
    opt.calibration_file = "/nonexistent-calibration";
    auto r = z03(a, b, c, opt);
    double expect = c03_constant(3, 1.0) /
                    (std::pow(3.0, 0) * vandermonde(a) * vandermonde(b) * vandermonde(c));
    CHECK(r.prefactor == doctest::Approx(expect).epsilon(1e-12));
    CHECK(r.value == doctest::Approx(expect * 5.0 / 23).epsilon(1e-9));
}

TEST_CASE("iterated evaluation agrees with direct on the one-triangle surface") {
    auto a = parse_angles("14/23,7/23,2/23");
    auto b = parse_angles("18/23,10/23,3/23");
    auto c = tilde(parse_angles("19/23,10/23,2/23"));
    ZOptions opt;
    opt.calibration_file = "/nonexistent-calibration";
    auto direct = z03(a, b, c, opt);
    opt.iterated_samples = 50;
    opt.seed = 3;
    auto it = z_gp_iterated(pants_surface(0, 3), 3, {a, b, c}, opt);
    CHECK(it.value == doctest::Approx(direct.value).epsilon(1e-9));
    CHECK(it.stderr_ == doctest::Approx(0.0));
}

}  // TEST_SUITE
