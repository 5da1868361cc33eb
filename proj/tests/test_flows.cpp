#include <doctest.h>

#include "honeyvol/flows.hpp"
#include "honeyvol/rng.hpp"

using namespace hv;

namespace {

FlowGraph random_connected_graph(Rng& rng, int nv, int extra) {
    FlowGraph g;
    g.nv = nv;
    for (int v = 1; v < nv; ++v)
        g.add_edge(static_cast<int>(rng.uniform() * v), v);
    for (int i = 0; i < extra; ++i) {
        int u = static_cast<int>(rng.uniform() * nv);
        int v = static_cast<int>(rng.uniform() * nv);
        if (u != v) g.add_edge(u, v);
    }
    return g;
}

}  // namespace

TEST_SUITE("flows") {

TEST_CASE("spanning tree count matches brute force on K4 and a multigraph") {
    FlowGraph k4;
    k4.nv = 4;
    for (int u = 0; u < 4; ++u)
        for (int v = u + 1; v < 4; ++v) k4.add_edge(u, v);
    CHECK(spanning_tree_count(k4) == 16);
    CHECK(spanning_tree_count_bruteforce(k4) == 16);

    FlowGraph m;  // doubled edge triangle
    m.nv = 3;
    m.add_edge(0, 1);
    m.add_edge(0, 1);
    m.add_edge(1, 2);
    m.add_edge(2, 0);
    CHECK(spanning_tree_count(m) == spanning_tree_count_bruteforce(m));
}

TEST_CASE("spanning tree count matches brute force on random graphs") {
    Rng rng(11, 0);
    for (int t = 0; t < 25; ++t) {
        auto g = random_connected_graph(rng, 4 + t % 5, 3);
        CHECK(spanning_tree_count(g) == spanning_tree_count_bruteforce(g));
    }
}

TEST_CASE("solve_flow reproduces a prescribed integer flow exactly") {
    Rng rng(5, 0);
    for (int t = 0; t < 25; ++t) {
        auto g = random_connected_graph(rng, 6, 4);
        Flow w(g.ne());
        for (auto& x : w) x = Rat(static_cast<long long>(rng.uniform() * 11) - 5);
        auto phi = divergence(g, w);
        auto T = find_spanning_tree(g);
        std::vector<bool> in_tree(g.ne(), false);
        for (int e : T) in_tree[e] = true;
        std::vector<int> S;
        std::vector<Rat> vals;
        for (int e = 0; e < g.ne(); ++e)
            if (!in_tree[e]) {
                S.push_back(e);
                vals.push_back(w[e]);
            }
        auto sol = solve_flow(g, phi, S, vals);
        REQUIRE(sol.size() == w.size());
        for (int e = 0; e < g.ne(); ++e) CHECK(sol[e] == w[e]);
    }
}

TEST_CASE("check_solvable rejects divergences with nonzero total") {
    FlowGraph g;
    g.nv = 2;
    g.add_edge(0, 1);
    CHECK(check_solvable(g, {Rat(1), Rat(-1)}));
    CHECK_FALSE(check_solvable(g, {Rat(1), Rat(0)}));
}

}  // TEST_SUITE
