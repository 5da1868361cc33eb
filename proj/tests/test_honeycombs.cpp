#include <doctest.h>

#include "honeyvol/svg.hpp"
#include "honeyvol/volumes.hpp"

using namespace hv;

namespace {

// An interior cotree point of the first positive cell of the reference
// boundary triple, found by scanning the (one-dimensional) height polytope.
struct Realized {
    StructureGraph G;
    Honeycomb h;
};

Realized realize_reference_cell() {
    auto a = parse_angles("14/23,7/23,2/23");
    auto b = parse_angles("18/23,10/23,3/23");
    auto c_hive = parse_angles("19/23,10/23,2/23");
    auto g = build_grid(3, 1);
    for (const auto& col : enumerate_color_maps(g)) {
        auto G = reduce(g, col);
        auto est = volume_summand(G, a, b, c_hive);
        if (!est.exact || est.exact_value == 0) continue;
        auto phi = boundary_divergence(G, a, b, c_hive);
        auto T = find_spanning_tree(G.fg);
        std::vector<bool> in_T(G.ne(), false);
        for (int e : T) in_T[e] = true;
        std::vector<int> S;
        for (int e = 0; e < G.ne(); ++e)
            if (!in_T[e]) S.push_back(e);
        REQUIRE(S.size() == 1);
        for (int j = 1; j < 200; ++j) {
            std::vector<Rat> point{Rat(j, 200)};
            if (!membership(G, phi, S, point)) continue;
            auto L = heights_from_cotree(G, phi, S, point);
            Flow w(G.ne());
            for (int e = 0; e < G.ne(); ++e) w[e] = G.flow_of_height(e, L[e]);
            return {G, realize(G, w)};
        }
    }
    FAIL("no interior point found");
    return {};
}

}  // namespace

TEST_SUITE("honeycombs") {

TEST_CASE("interior points of a positive cell realize without violations") {
    auto r = realize_reference_cell();
    CHECK(r.h.segments.size() == 18);
    for (const auto& s : r.h.segments) {
        Rat sa = s.a[0] + s.a[1] + s.a[2];
        Rat sb = s.b[0] + s.b[1] + s.b[2];
        CHECK(sa == 1);
        CHECK(sb == 1);
    }
}

TEST_CASE("points outside the polytope fail membership or realization") {
    auto a = parse_angles("14/23,7/23,2/23");
    auto b = parse_angles("18/23,10/23,3/23");
    auto c_hive = parse_angles("19/23,10/23,2/23");
    auto g = build_grid(3, 1);
    auto cols = enumerate_color_maps(g);
    auto G = reduce(g, cols[0]);
    auto phi = boundary_divergence(G, a, b, c_hive);
    auto T = find_spanning_tree(G.fg);
    std::vector<bool> in_T(G.ne(), false);
    for (int e : T) in_T[e] = true;
    std::vector<int> S;
    for (int e = 0; e < G.ne(); ++e)
        if (!in_T[e]) S.push_back(e);
    // Scan the whole box; every violating point must be flagged consistently.
    int outside = 0;
    for (int j = 0; j <= 20; ++j) {
        std::vector<Rat> point{Rat(j, 20)};
        if (membership(G, phi, S, point)) continue;
        ++outside;
        auto L = heights_from_cotree(G, phi, S, point);
        Flow w(G.ne());
        bool box_ok = true;
        for (int e = 0; e < G.ne(); ++e) {
            w[e] = G.flow_of_height(e, L[e]);
            box_ok = box_ok && L[e] >= 0 && L[e] <= 1;
        }
        if (!box_ok) CHECK_THROWS_AS(realize(G, w), GeometryViolation);
    }
    CHECK(outside > 0);
}

TEST_CASE("svg rendering is deterministic and well formed") {
    auto r = realize_reference_cell();
    auto svg1 = render_honeycomb(r.h);
    auto svg2 = render_honeycomb(r.h);
    CHECK(svg1 == svg2);
    CHECK(svg1.find("<svg") != std::string::npos);
    CHECK(svg1.find("</svg>") != std::string::npos);
    CHECK(svg1.find("<line") != std::string::npos);

    auto g = build_grid(3, 1);
    auto cols = enumerate_color_maps(g);
    auto grid_svg = render_grid(g, cols[0]);
    CHECK(grid_svg.find("<svg") != std::string::npos);
    CHECK(grid_svg == render_grid(g, cols[0]));
}

}  // TEST_SUITE
