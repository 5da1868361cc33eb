#include <doctest.h>

#include <set>

#include "honeyvol/honeycombs.hpp"

using namespace hv;

TEST_SUITE("hivegrid") {

TEST_CASE("build_grid rejects bad sizes") {
    CHECK_THROWS_AS(build_grid(1, 0), InvalidSize);
    CHECK_THROWS_AS(build_grid(3, -1), InvalidSize);
    CHECK_THROWS_AS(build_grid(3, 4), InvalidSize);
}

TEST_CASE("coloring counts at n=3 are 1,9,9,1") {
    const int expected[] = {1, 9, 9, 1};
    for (int d = 0; d <= 3; ++d) {
        auto g = build_grid(3, d);
        auto cols = enumerate_color_maps(g);
        CHECK(static_cast<int>(cols.size()) == expected[d]);
    }
}

TEST_CASE("color maps are distinct and have the right mixed-edge count") {
    for (int n : {3, 4}) {
        for (int d = 0; d <= n; ++d) {
            auto g = build_grid(n, d);
            auto cols = enumerate_color_maps(g);
            std::set<ColorMap> uniq(cols.begin(), cols.end());
            CHECK(uniq.size() == cols.size());
            for (const auto& c : cols) CHECK(m_edge_count(c) == d * (n - d));
        }
    }
}

TEST_CASE("reduced graph has n^2+3n vertices and 3n(n+1)/2 edges") {
    for (int n : {3, 4}) {
        for (int d = 0; d <= n; ++d) {
            auto g = build_grid(n, d);
            for (const auto& c : enumerate_color_maps(g)) {
                auto G = reduce(g, c);
                CHECK(G.nv() == n * n + 3 * n);
                CHECK(G.ne() == 3 * n * (n + 1) / 2);
                CHECK(G.fg.connected());
            }
        }
    }
}

}  // TEST_SUITE
