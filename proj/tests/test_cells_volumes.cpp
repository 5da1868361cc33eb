#include <doctest.h>

#include <algorithm>

#include "honeyvol/assembler.hpp"
#include "honeyvol/volumes.hpp"

using namespace hv;

namespace {
const char* kA = "14/23,7/23,2/23";
const char* kB = "18/23,10/23,3/23";
const char* kCHive = "19/23,10/23,2/23";  // hive-side convention
}  // namespace

TEST_SUITE("cells_volumes") {

TEST_CASE("reference boundary triple: nine cells, total volume 5/23") {
    auto a = parse_angles(kA), b = parse_angles(kB);
    auto c = tilde(parse_angles(kCHive));
    auto r = z03(a, b, c);
    REQUIRE(r.solvable);
    CHECK(r.n_cells == 9);
    CHECK(r.volume_sum == doctest::Approx(5.0 / 23).epsilon(1e-12));
    CHECK(r.value > 0);
    auto vols = r.cell_volumes;
    std::sort(vols.begin(), vols.end());
    CHECK(vols[7] == doctest::Approx(2.0 / 23).epsilon(1e-12));
    CHECK(vols[8] == doctest::Approx(3.0 / 23).epsilon(1e-12));
    int positive = 0;
    for (double v : vols) positive += v > 0;
    CHECK(positive == 2);
}

TEST_CASE("flow-polytope route reproduces the cell-system volumes") {
    auto a = parse_angles(kA), b = parse_angles(kB);
    auto c_hive = parse_angles(kCHive);
    auto g = build_grid(3, 1);
    Rat total = 0;
    for (const auto& col : enumerate_color_maps(g)) {
        auto G = reduce(g, col);
        auto est = volume_summand(G, a, b, c_hive);
        REQUIRE((est.exact || est.method == "empty"));
        if (est.exact) total += est.exact_value;
    }
    CHECK(total == Rat(5, 23));
}

TEST_CASE("monte carlo volume agrees with the exact volume within 3 sigma") {
    auto a = parse_angles(kA).rats(), b = parse_angles(kB).rats();
    auto c = tilde(parse_angles(kCHive)).rats();
    auto g = build_grid(3, 1);
    auto cols = enumerate_color_maps(g);
    int checked = 0;
    for (const auto& col : cols) {
        auto cell = triangle_cell(g, col, a, b, c);
        if (!cell) continue;
        auto P = polytope_from_cell(*cell);
        Rat exact = volume_exact(P);
        if (exact == 0) continue;
        auto mc = volume_mc(P, 200000, 99 + checked);
        CHECK(std::fabs(mc.value - to_double(exact)) <= 3 * mc.stderr_);
        ++checked;
    }
    CHECK(checked == 2);
}

TEST_CASE("symbolic triangle evaluator matches the direct cell volumes") {
    TriangleEvaluator ev(3);
    REQUIRE(ev.supported());
    auto a = parse_angles(kA), b = parse_angles(kB);
    auto c = tilde(parse_angles(kCHive));
    double fast = ev.volsum(1, a.vals(), b.vals(), c.vals());
    CHECK(fast == doctest::Approx(5.0 / 23).epsilon(1e-9));

    Z03Fast z(3, 1.0);
    auto direct = z03(a, b, c, [] {
        ZOptions o;
        o.calibration_file = "/nonexistent-calibration";
        return o;
    }());
    CHECK(z.value(a.vals(), b.vals(), c.vals()) ==
          doctest::Approx(direct.value).epsilon(1e-9));
}

}  // TEST_SUITE
