#pragma once
// Reduced structure graphs of colored grids: vertices are m-free faces plus
// one univalent stub per boundary edge, edges are maximal chains.  Provides
// the sign map, boundary divergence data, the cone of cover constraints over
// edge heights, strict membership tests, and the exact geometric realization
// of a flow as a honeycomb inside the triangle (with validation).

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "honeyvol/angles.hpp"
#include "honeyvol/cells.hpp"
#include "honeyvol/flows.hpp"
#include "honeyvol/hivegrid.hpp"
#include "honeyvol/rational.hpp"

namespace hv {

struct InvalidColorMap : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GeometryViolation : std::runtime_error {
    int a = -1, b = -1;  // offending segment (edge) ids, -1 if n/a
    GeometryViolation(const std::string& msg, int a_ = -1, int b_ = -1)
        : std::runtime_error(msg), a(a_), b(b_) {}
};

// Sides of the triangle, named by the boundary data they carry.
enum Side : int { kSideAlpha = 0, kSideBeta = 1, kSideGamma = 2 };

struct StructureGraph {
    const HiveGrid* grid = nullptr;
    ColorMap col;
    int n = 0, d = 0;
    std::vector<Chain> chains;  // chains[i] is FlowGraph edge i
    FlowGraph fg;
    std::vector<int> vertex_face;   // fg vertex -> grid face id or -1 (stub)
    std::vector<int> vertex_bedge;  // fg vertex -> boundary grid edge or -1
    std::vector<int> face_vertex;   // grid face -> fg vertex or -1
    std::vector<int> stub_of_bedge; // grid edge -> fg vertex or -1
    std::vector<int> sign;          // fg vertex -> +1 / -1
    std::vector<int> edge_color, edge_type;
    std::vector<std::array<int, 3>> coord;      // per vertex, grid heights by type (stub: -1s)
    std::vector<int> boundary_order;            // stub vertices, ccw from root
    std::array<std::vector<int>, 3> side_stubs; // per side, stubs in ccw order (n each)
    std::vector<int> e2c;                       // grid edge -> chain id (-1 for m)

    int nv() const { return fg.nv; }
    int ne() const { return static_cast<int>(chains.size()); }
    // height of edge e for a flow value w_e (orientation end0 -> end1)
    Rat height(int e, const Rat& w) const { return Rat(-sign[fg.edges[e].first]) * w; }
    // flow value reproducing height L on edge e
    Rat flow_of_height(int e, const Rat& L) const {
        return Rat(-sign[fg.edges[e].first]) * L;
    }
};

// Boundary grid edges in counterclockwise order around the hexagonal grid,
// grouped into the three triangle sides (each side = corner-cut run + long run).
inline std::array<std::vector<int>, 3> boundary_side_edges(const HiveGrid& g) {
    const int n = g.n, d = g.d;
    std::array<std::vector<int>, 3> side;
    for (int r = 0; r < d; ++r) side[kSideGamma].push_back(g.edge_index(1, r, d - r));
    for (int r = d; r < n; ++r) side[kSideGamma].push_back(g.edge_index(0, r, 0));
    for (int s = 0; s < d; ++s) side[kSideBeta].push_back(g.edge_index(2, n, s));
    for (int r = n - 1; r >= d; --r) side[kSideBeta].push_back(g.edge_index(1, r, n + d - r));
    for (int r = d - 1; r >= 0; --r) side[kSideAlpha].push_back(g.edge_index(0, r, n));
    for (int s = n - 1; s >= d; --s) side[kSideAlpha].push_back(g.edge_index(2, 0, s));
    return side;
}

inline StructureGraph reduce(const HiveGrid& g, const ColorMap& col) {
    auto v = validate_color_map(g, col);
    if (!v.ok) throw InvalidColorMap("invalid color map: " + v.detail);

    StructureGraph G;
    G.grid = &g;
    G.col = col;
    G.n = g.n;
    G.d = g.d;
    G.chains = extract_chains(g, col);
    G.e2c.assign(g.edges.size(), -1);
    for (int i = 0; i < G.ne(); ++i)
        for (int e : G.chains[i].edges) G.e2c[e] = i;

    G.face_vertex.assign(g.faces.size(), -1);
    G.stub_of_bedge.assign(g.edges.size(), -1);
    auto face_has_m = [&](int f) {
        for (int e : g.faces[f].edge)
            if (col[e] == kCM) return true;
        return false;
    };
    int nv = 0;
    for (int f = 0; f < static_cast<int>(g.faces.size()); ++f) {
        if (face_has_m(f)) continue;
        G.face_vertex[f] = nv++;
        G.vertex_face.push_back(f);
        G.vertex_bedge.push_back(-1);
        G.sign.push_back(g.faces[f].up ? +1 : -1);
    }
    auto sides = boundary_side_edges(g);
    for (int s : {kSideGamma, kSideBeta, kSideAlpha}) {
        for (int e : sides[s]) {
            G.stub_of_bedge[e] = nv;
            G.vertex_face.push_back(-1);
            G.vertex_bedge.push_back(e);
            G.sign.push_back(col[e] == kC1 ? +1 : -1);
            G.boundary_order.push_back(nv);
            G.side_stubs[s].push_back(nv);
            ++nv;
        }
    }
    G.fg.nv = nv;
    auto endpoint = [&](const ChainEnd& e) {
        return e.is_face ? G.face_vertex[e.idx] : G.stub_of_bedge[e.idx];
    };
    for (const auto& ch : G.chains) {
        int va = endpoint(ch.ends[0]), vb = endpoint(ch.ends[1]);
        if (va < 0 || vb < 0) throw InvalidColorMap("chain endpoint unresolved");
        G.fg.add_edge(va, vb);
        G.edge_color.push_back(ch.color);
        int t = g.edges[ch.edges.front()].type;
        for (int e : ch.edges)
            if (g.edges[e].type != t)
                throw InvalidColorMap("chain with mixed edge types");
        G.edge_type.push_back(t);
    }
    G.coord.assign(nv, {-1, -1, -1});
    for (int vtx = 0; vtx < nv; ++vtx) {
        int f = G.vertex_face[vtx];
        if (f < 0) continue;
        for (int t = 0; t < 3; ++t) G.coord[vtx][t] = g.edges[g.faces[f].edge[t]].h;
    }
    return G;
}

// ----------------------------------------------------------- cone / covers

struct CoverPair {
    int lo, hi;  // edge ids of equal type: height(lo) <= height(hi), strict in the open cone
};
struct ConeSpec {
    std::vector<CoverPair> covers;
    // additional closure rows c0 + cf . L >= 0 over edge heights, coming from
    // rhombi whose corners were contracted away with the m edges
    std::vector<std::pair<Rat, std::vector<Rat>>> extra;
};

namespace detail {
// affine expression over reduced-edge heights for the (possibly m-colored)
// grid edge kk: chains are unit vectors, an m edge is 1 - (sum of the two
// non-m chains of its first adjacent face)
inline std::pair<Rat, std::vector<Rat>> height_expr(const StructureGraph& G, int kk) {
    const HiveGrid& g = *G.grid;
    std::pair<Rat, std::vector<Rat>> e{Rat(0), std::vector<Rat>(G.ne(), Rat(0))};
    if (G.col[kk] != kCM) {
        e.second[G.e2c[kk]] = 1;
        return e;
    }
    e.first = 1;
    int f = g.edge_faces[kk][0];
    for (int x : g.faces[f].edge)
        if (G.col[x] != kCM) e.second[G.e2c[x]] -= 1;
    return e;
}
}  // namespace detail

// All closure constraints (beyond the per-edge [0,1] box) over edge heights:
// nonnegativity of contracted m labels plus all rhombus comparisons.
inline std::vector<std::pair<Rat, std::vector<Rat>>> height_constraints(
    const StructureGraph& G) {
    const HiveGrid& g = *G.grid;
    std::vector<std::pair<Rat, std::vector<Rat>>> rows;
    for (int kk = 0; kk < static_cast<int>(g.edges.size()); ++kk)
        if (G.col[kk] == kCM) rows.push_back(detail::height_expr(G, kk));
    for (int kk = 0; kk < static_cast<int>(g.edges.size()); ++kk) {
        if (G.col[kk] == kCM || g.edge_faces[kk].size() != 2) continue;
        int t = (g.edges[kk].type + 2) % 3;
        int o1 = -1, o2 = -1;
        for (int x : g.faces[g.edge_faces[kk][0]].edge)
            if (x != kk && g.edges[x].type == t) o1 = x;
        for (int x : g.faces[g.edge_faces[kk][1]].edge)
            if (x != kk && g.edges[x].type == t) o2 = x;
        if (o1 < 0 || o2 < 0) continue;
        int hi = g.edges[o1].h > g.edges[o2].h ? o1 : o2;
        int lo = hi == o1 ? o2 : o1;
        auto e = detail::height_expr(G, hi);
        auto l = detail::height_expr(G, lo);
        e.first -= l.first;
        for (int j = 0; j < G.ne(); ++j) e.second[j] -= l.second[j];
        rows.push_back(std::move(e));
    }
    return rows;
}

inline ConeSpec cone_constraints(const StructureGraph& G) {
    ConeSpec spec;
    std::set<std::pair<int, int>> seen;
    for (auto& row : height_constraints(G)) {
        int pos = -1, neg = -1, nz = 0;
        for (int j = 0; j < G.ne(); ++j) {
            if (row.second[j] == 0) continue;
            ++nz;
            if (row.second[j] == 1) pos = j;
            if (row.second[j] == -1) neg = j;
        }
        if (row.first == 0 && nz == 2 && pos >= 0 && neg >= 0 &&
            G.edge_type[pos] == G.edge_type[neg]) {
            if (seen.insert({neg, pos}).second) spec.covers.push_back({neg, pos});
        } else {
            spec.extra.push_back(std::move(row));
        }
    }
    return spec;
}

// ------------------------------------------------------ boundary divergence

inline std::vector<Rat> tilde_rats(const std::vector<Rat>& v) {
    std::vector<Rat> out;
    for (auto it = v.rbegin(); it != v.rend(); ++it) out.push_back(Rat(1) - *it);
    return out;
}

// Per-boundary-edge exact labels for the hive-convention boundary triple
// (alpha, beta, gamma_hive); gamma_hive is the reversal-complement of the
// moduli vector on the gamma side.
inline std::map<int, Rat> boundary_labels(const HiveGrid& g, const std::vector<Rat>& alpha,
                                          const std::vector<Rat>& beta,
                                          const std::vector<Rat>& gamma_hive) {
    SlotLabels slots{slot_const(alpha), slot_const(beta), slot_const(tilde_rats(gamma_hive))};
    auto labels = hive_labels(g, slots);
    std::map<int, Rat> out;
    for (const auto& [e, L] : labels) {
        if (!L.u.empty()) throw std::logic_error("numeric label with glue term");
        out[e] = L.c0;
    }
    return out;
}

// Divergence data phi: -s(v) at trivalent vertices, -s(v) * label at stubs.
inline Divergence boundary_divergence(const StructureGraph& G, const AngleVector& alpha,
                                      const AngleVector& beta,
                                      const AngleVector& gamma_hive) {
    for (const AngleVector* a : {&alpha, &beta, &gamma_hive})
        if (!a->regular()) throw NotRegular("boundary angle vector not regular");
    auto labels = boundary_labels(*G.grid, alpha.rats(), beta.rats(), gamma_hive.rats());
    Divergence phi(G.nv(), Rat(0));
    for (int v = 0; v < G.nv(); ++v) {
        if (G.vertex_face[v] >= 0)
            phi[v] = Rat(-G.sign[v]);
        else
            phi[v] = Rat(-G.sign[v]) * labels.at(G.vertex_bedge[v]);
    }
    if (!check_solvable(G.fg, phi))
        throw NotSolvable("boundary sums incompatible with this color number");
    return phi;
}

// ------------------------------------------------------- membership / realize

// Heights of all edges from the heights of the cotree edges (exact).
inline std::vector<Rat> heights_from_cotree(const StructureGraph& G, const Divergence& phi,
                                            const std::vector<int>& S,
                                            const std::vector<Rat>& point) {
    std::vector<Rat> values(S.size());
    for (size_t j = 0; j < S.size(); ++j) values[j] = G.flow_of_height(S[j], point[j]);
    Flow w = solve_flow(G.fg, phi, S, values);
    std::vector<Rat> L(G.ne());
    for (int e = 0; e < G.ne(); ++e) L[e] = G.height(e, w[e]);
    return L;
}

// True iff the point (heights over the cotree S) yields heights in [0,1]
// with all cone constraints strictly satisfied.
inline bool membership(const StructureGraph& G, const Divergence& phi,
                       const std::vector<int>& S, const std::vector<Rat>& point) {
    auto L = heights_from_cotree(G, phi, S, point);
    for (const auto& h : L)
        if (h < 0 || h > 1) return false;
    for (const auto& [c0, cf] : height_constraints(G)) {
        Rat val = c0;
        for (int j = 0; j < G.ne(); ++j)
            if (cf[j] != 0) val += cf[j] * L[j];
        if (val <= 0) return false;
    }
    return true;
}

// --------------------------------------------------------------- realization

struct HoneySegment {
    int edge;         // reduced edge id
    int color, type;
    std::array<Rat, 3> a, b;  // barycentric endpoints (sum 1)
};
struct Honeycomb {
    std::vector<std::array<Rat, 3>> coords;  // per fg vertex
    std::vector<HoneySegment> segments;
};

namespace detail {
// direction of a type-t segment leaving a vertex of sign +1
inline std::array<Rat, 3> type_dir(int t) {
    std::array<Rat, 3> d{Rat(0), Rat(0), Rat(0)};
    d[(t + 1) % 3] = 1;
    d[(t + 2) % 3] = -1;
    return d;
}
inline Rat cross2(const Rat& ax, const Rat& ay, const Rat& bx, const Rat& by) {
    return ax * by - ay * bx;
}
}  // namespace detail

// Geometric realization of a flow in the open cone; validates segment
// directions, the 0/1-only crossing rule and containment in the triangle.
inline Honeycomb realize(const StructureGraph& G, const Flow& w) {
    std::vector<Rat> L(G.ne());
    for (int e = 0; e < G.ne(); ++e) {
        L[e] = G.height(e, w[e]);
        if (L[e] < 0 || L[e] > 1)
            throw GeometryViolation("edge height outside [0,1]", e);
    }
    Honeycomb h;
    h.coords.assign(G.nv(), {Rat(0), Rat(0), Rat(0)});
    const HiveGrid& g = *G.grid;
    for (int v = 0; v < G.nv(); ++v) {
        int f = G.vertex_face[v];
        if (f < 0) continue;
        Rat sum = 0;
        for (int t = 0; t < 3; ++t) {
            h.coords[v][t] = L[G.e2c[g.faces[f].edge[t]]];
            sum += h.coords[v][t];
        }
        if (sum != 1) throw GeometryViolation("vertex coordinates do not sum to 1", v);
    }
    // stub coordinates: walk from the interior endpoint to the triangle boundary
    for (int e = 0; e < G.ne(); ++e) {
        auto [va, vb] = G.fg.edges[e];
        for (int v : {va, vb}) {
            if (G.vertex_face[v] >= 0) continue;
            int u = v == va ? vb : va;
            if (G.vertex_face[u] < 0)
                throw GeometryViolation("chain with two boundary ends", e);
            auto dir = detail::type_dir(G.edge_type[e]);
            int dec = G.sign[u] > 0 ? (G.edge_type[e] + 2) % 3 : (G.edge_type[e] + 1) % 3;
            Rat t = h.coords[u][dec];  // parameter at which that coordinate hits 0
            if (t < 0) throw GeometryViolation("stub leaves the triangle", e);
            for (int i = 0; i < 3; ++i)
                h.coords[v][i] = h.coords[u][i] + Rat(G.sign[u]) * t * dir[i];
        }
    }
    // direction check per interior segment: displacement from the + endpoint
    // is a nonnegative multiple of the type direction
    for (int e = 0; e < G.ne(); ++e) {
        auto [va, vb] = G.fg.edges[e];
        if (G.vertex_face[va] < 0 || G.vertex_face[vb] < 0) continue;
        int from = G.sign[va] > 0 ? va : vb;
        int to = from == va ? vb : va;
        auto dir = detail::type_dir(G.edge_type[e]);
        for (int i = 0; i < 3; ++i) {
            Rat diff = h.coords[to][i] - h.coords[from][i];
            if (dir[i] == 0) {
                if (diff != 0) throw GeometryViolation("segment not axis-parallel", e);
            } else if (diff * dir[i] < 0) {
                throw GeometryViolation("segment direction reversed", e);
            }
        }
    }
    for (int e = 0; e < G.ne(); ++e) {
        auto [va, vb] = G.fg.edges[e];
        h.segments.push_back(
            {e, G.edge_color[e], G.edge_type[e], h.coords[va], h.coords[vb]});
    }
    // pairwise interior disjointness except transversal {0,1} crossings;
    // work in the affine chart (x1, x2)
    auto px = [](const std::array<Rat, 3>& p) { return std::pair<Rat, Rat>{p[1], p[2]}; };
    for (size_t i = 0; i < h.segments.size(); ++i) {
        for (size_t j = i + 1; j < h.segments.size(); ++j) {
            const auto& s1 = h.segments[i];
            const auto& s2 = h.segments[j];
            auto [ax, ay] = px(s1.a);
            auto [bx, by] = px(s1.b);
            auto [cx, cy] = px(s2.a);
            auto [dx, dy] = px(s2.b);
            if ((ax == bx && ay == by) || (cx == dx && cy == dy)) continue;  // degenerate
            // shared graph vertex => endpoints touch legitimately
            auto [v1a, v1b] = G.fg.edges[s1.edge];
            auto [v2a, v2b] = G.fg.edges[s2.edge];
            if (v1a == v2a || v1a == v2b || v1b == v2a || v1b == v2b) continue;
            using detail::cross2;
            Rat o1 = cross2(bx - ax, by - ay, cx - ax, cy - ay);
            Rat o2 = cross2(bx - ax, by - ay, dx - ax, dy - ay);
            Rat o3 = cross2(dx - cx, dy - cy, ax - cx, ay - cy);
            Rat o4 = cross2(dx - cx, dy - cy, bx - cx, by - cy);
            bool proper = ((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) &&
                          ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0));
            if (proper) {
                bool allowed = (s1.color == kC0 && s2.color == kC1) ||
                               (s1.color == kC1 && s2.color == kC0);
                if (!allowed)
                    throw GeometryViolation("disallowed crossing", s1.edge, s2.edge);
                continue;
            }
            // touching or collinear overlap without a shared vertex
            bool touch = false;
            auto between = [](const Rat& p, const Rat& q, const Rat& x) {
                return (p <= x && x <= q) || (q <= x && x <= p);
            };
            auto on_seg = [&](const Rat& o, const Rat& px1, const Rat& py1,
                              const Rat& qx, const Rat& qy, const Rat& x, const Rat& y) {
                return o == 0 && between(px1, qx, x) && between(py1, qy, y);
            };
            if (on_seg(o1, ax, ay, bx, by, cx, cy) || on_seg(o2, ax, ay, bx, by, dx, dy) ||
                on_seg(o3, cx, cy, dx, dy, ax, ay) || on_seg(o4, cx, cy, dx, dy, bx, by))
                touch = true;
            if (touch) throw GeometryViolation("segments overlap or touch", s1.edge, s2.edge);
        }
    }
    return h;
}

}  // namespace hv
