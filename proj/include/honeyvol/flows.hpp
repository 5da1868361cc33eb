#pragma once
// Flow algebra on finite graphs: divergence systems, spanning-tree
// parametrization and counting, sieving, and the volume normalizer.

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "honeyvol/rational.hpp"

namespace hv {

struct Disconnected : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotSolvable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotCotree : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotUnivalent : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Overlap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Undirected graph with a fixed reference orientation per edge (stored
// endpoint order); one scalar per edge represents the antisymmetric flow.
struct FlowGraph {
    int nv = 0;
    std::vector<std::pair<int, int>> edges;  // reference orientation: first -> second
    std::vector<bool> is_boundary;           // optional per-vertex flag

    void add_edge(int u, int v) {
        if (u == v) throw std::invalid_argument("self-loop not allowed");
        edges.emplace_back(u, v);
    }
    int ne() const { return static_cast<int>(edges.size()); }

    std::vector<std::vector<std::pair<int, int>>> adjacency() const {
        std::vector<std::vector<std::pair<int, int>>> adj(nv);
        for (int e = 0; e < ne(); ++e) {
            adj[edges[e].first].emplace_back(edges[e].second, e);
            adj[edges[e].second].emplace_back(edges[e].first, e);
        }
        return adj;
    }

    // Connected-component id per vertex.
    std::vector<int> components() const {
        std::vector<int> comp(nv, -1);
        auto adj = adjacency();
        int c = 0;
        for (int s = 0; s < nv; ++s) {
            if (comp[s] >= 0) continue;
            std::queue<int> q;
            q.push(s);
            comp[s] = c;
            while (!q.empty()) {
                int v = q.front();
                q.pop();
                for (auto [w, e] : adj[v])
                    if (comp[w] < 0) {
                        comp[w] = c;
                        q.push(w);
                    }
            }
            ++c;
        }
        return comp;
    }
    bool connected() const {
        if (nv == 0) return true;
        auto comp = components();
        return *std::max_element(comp.begin(), comp.end()) == 0;
    }
};

using Flow = std::vector<Rat>;        // per edge, signed against reference orientation
using Divergence = std::vector<Rat>;  // per vertex

// (div w)(v) = sum of flow out of v.
inline Divergence divergence(const FlowGraph& g, const Flow& w) {
    if (static_cast<int>(w.size()) != g.ne())
        throw std::invalid_argument("flow size mismatch");
    Divergence d(g.nv, Rat(0));
    for (int e = 0; e < g.ne(); ++e) {
        d[g.edges[e].first] += w[e];
        d[g.edges[e].second] -= w[e];
    }
    return d;
}

// Solvable iff the divergence sums to zero on every connected component.
inline bool check_solvable(const FlowGraph& g, const Divergence& phi) {
    if (static_cast<int>(phi.size()) != g.nv)
        throw std::invalid_argument("divergence size mismatch");
    auto comp = g.components();
    int nc = g.nv ? *std::max_element(comp.begin(), comp.end()) + 1 : 0;
    std::vector<Rat> sums(nc, Rat(0));
    for (int v = 0; v < g.nv; ++v) sums[comp[v]] += phi[v];
    for (const auto& s : sums)
        if (s != 0) return false;
    return true;
}

// Deterministic lexicographic BFS spanning tree (edge indices).
inline std::vector<int> find_spanning_tree(const FlowGraph& g) {
    if (!g.connected()) throw Disconnected("find_spanning_tree");
    auto adj = g.adjacency();
    for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    std::vector<bool> seen(g.nv, false);
    std::vector<int> tree;
    std::queue<int> q;
    if (g.nv == 0) return tree;
    seen[0] = true;
    q.push(0);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (auto [w, e] : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                tree.push_back(e);
                q.push(w);
            }
    }
    return tree;
}

// Unique flow with divergence phi and prescribed values on the cotree S,
// computed by leaf-peeling on the spanning tree E \ S.
inline Flow solve_flow(const FlowGraph& g, const Divergence& phi,
                       const std::vector<int>& S, const std::vector<Rat>& values) {
    if (!check_solvable(g, phi)) throw NotSolvable("solve_flow");
    if (S.size() != values.size()) throw std::invalid_argument("S/value size");
    std::vector<bool> in_S(g.ne(), false);
    for (int e : S) in_S[e] = true;
    // residual divergence after fixing the cotree values
    Divergence res = phi;
    Flow w(g.ne(), Rat(0));
    for (size_t i = 0; i < S.size(); ++i) {
        int e = S[i];
        w[e] = values[i];
        res[g.edges[e].first] -= values[i];
        res[g.edges[e].second] += values[i];
    }
    // tree adjacency & check
    std::vector<int> deg(g.nv, 0);
    std::vector<std::vector<std::pair<int, int>>> tadj(g.nv);
    int tcount = 0;
    for (int e = 0; e < g.ne(); ++e)
        if (!in_S[e]) {
            tadj[g.edges[e].first].emplace_back(g.edges[e].second, e);
            tadj[g.edges[e].second].emplace_back(g.edges[e].first, e);
            ++deg[g.edges[e].first];
            ++deg[g.edges[e].second];
            ++tcount;
        }
    if (tcount != g.nv - 1) throw NotCotree("E \\ S has wrong edge count");
    // peel leaves
    std::vector<bool> done_v(g.nv, false), done_e(g.ne(), false);
    std::queue<int> leaves;
    for (int v = 0; v < g.nv; ++v)
        if (deg[v] == 1) leaves.push(v);
    int processed = 0;
    while (!leaves.empty()) {
        int v = leaves.front();
        leaves.pop();
        if (done_v[v]) continue;
        int pend = -1, nbr = -1;
        for (auto [u, e] : tadj[v])
            if (!done_e[e]) {
                pend = e;
                nbr = u;
                break;
            }
        if (pend < 0) continue;
        // flow out of v along pend must equal res[v]
        Rat val = res[v];
        if (g.edges[pend].first == v)
            w[pend] = val;
        else
            w[pend] = -val;
        res[v] = 0;
        res[nbr] += val;
        done_e[pend] = true;
        done_v[v] = true;
        ++processed;
        if (--deg[nbr] == 1) leaves.push(nbr);
    }
    if (processed != tcount) throw NotCotree("E \\ S is not a tree");
    return w;
}

// Exact spanning-tree count: fraction-free Bareiss determinant of the
// reduced Laplacian.
inline Int spanning_tree_count(const FlowGraph& g) {
    if (!g.connected()) throw Disconnected("spanning_tree_count");
    int n = g.nv - 1;
    if (n <= 0) return 1;
    std::vector<std::vector<Int>> L(n, std::vector<Int>(n, 0));
    for (auto [u, v] : g.edges) {
        if (u < n) L[u][u] += 1;
        if (v < n) L[v][v] += 1;
        if (u < n && v < n) {
            L[u][v] -= 1;
            L[v][u] -= 1;
        }
    }
    Int prev = 1;
    int sign = 1;
    for (int k = 0; k < n; ++k) {
        if (L[k][k] == 0) {
            int p = -1;
            for (int r = k + 1; r < n; ++r)
                if (L[r][k] != 0) {
                    p = r;
                    break;
                }
            if (p < 0) return 0;
            std::swap(L[k], L[p]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                L[i][j] = (L[i][j] * L[k][k] - L[i][k] * L[k][j]) / prev;
        prev = L[k][k];
    }
    Int det = L[n - 1][n - 1];
    return sign > 0 ? det : -det;
}

// Brute-force oracle for small graphs: try all edge subsets of size |V|-1.
inline Int spanning_tree_count_bruteforce(const FlowGraph& g) {
    int ne = g.ne(), need = g.nv - 1;
    if (need <= 0) return 1;
    if (ne > 24) throw std::invalid_argument("bruteforce: too many edges");
    Int count = 0;
    std::vector<int> idx(need);
    std::function<void(int, int)> rec = [&](int pos, int start) {
        if (pos == need) {
            // acyclic & spanning check via union-find
            std::vector<int> par(g.nv);
            for (int i = 0; i < g.nv; ++i) par[i] = i;
            std::function<int(int)> find = [&](int x) {
                while (par[x] != x) x = par[x] = par[par[x]];
                return x;
            };
            for (int i = 0; i < need; ++i) {
                int a = find(g.edges[idx[i]].first), b = find(g.edges[idx[i]].second);
                if (a == b) return;
                par[a] = b;
            }
            count += 1;
            return;
        }
        for (int e = start; e < ne; ++e) {
            idx[pos] = e;
            rec(pos + 1, e + 1);
        }
    };
    rec(0, 0);
    return count;
}

struct SieveResult {
    FlowGraph graph;
    std::vector<int> vertex_map;  // old vertex -> new vertex
    std::vector<int> edge_map;    // old edge -> new edge (order preserved)
};

// Merge paired degree-1 vertices W[i] <-> Wp[i]; edges are preserved.
inline SieveResult sieve(const FlowGraph& g, const std::vector<int>& W,
                         const std::vector<int>& Wp) {
    if (W.size() != Wp.size()) throw std::invalid_argument("pairing size");
    std::vector<int> deg(g.nv, 0);
    for (auto [u, v] : g.edges) {
        ++deg[u];
        ++deg[v];
    }
    std::vector<int> mate(g.nv, -1);
    std::vector<bool> used(g.nv, false);
    for (size_t i = 0; i < W.size(); ++i) {
        int a = W[i], b = Wp[i];
        if (deg[a] != 1 || deg[b] != 1) throw NotUnivalent("sieve endpoint");
        if (used[a] || used[b] || a == b) throw Overlap("sieve pairing overlaps");
        used[a] = used[b] = true;
        mate[a] = b;
        mate[b] = a;
    }
    SieveResult out;
    out.vertex_map.assign(g.nv, -1);
    int next = 0;
    for (int v = 0; v < g.nv; ++v) {
        if (out.vertex_map[v] >= 0) continue;
        out.vertex_map[v] = next;
        if (mate[v] >= 0) out.vertex_map[mate[v]] = next;
        ++next;
    }
    out.graph.nv = next;
    out.graph.is_boundary.assign(next, false);
    out.edge_map.resize(g.ne());
    for (int e = 0; e < g.ne(); ++e) {
        out.graph.add_edge(out.vertex_map[g.edges[e].first],
                           out.vertex_map[g.edges[e].second]);
        out.edge_map[e] = e;
    }
    return out;
}

// Volume convention dVol = normalizer * Leb; cotree pushforward is then
// plain Lebesgue measure.
inline double volume_normalizer(const FlowGraph& g) {
    Int c = spanning_tree_count(g);
    return 1.0 / std::sqrt(c.convert_to<double>());
}

}  // namespace hv
