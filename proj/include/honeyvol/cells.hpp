#pragma once
// From a colored hive grid to the linear cell it indexes:
//  * maximal chains (the reduced edges carrying one height variable each),
//  * boundary labels as affine functions of glue variables,
//  * the joint equality/inequality system over one or several triangles,
//    reduced to free coordinates by exact Gaussian elimination.
// Cell volumes over the free coordinates are the summands of the volume
// formula (the spanning-tree normalization is absorbed by the cotree
// projection, which is measure-preserving).

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "honeyvol/hivegrid.hpp"
#include "honeyvol/rational.hpp"

namespace hv {

// ------------------------------------------------------------------ chains

struct ChainEnd {
    bool is_face;  // interior endpoint (m-free face) or boundary edge stub
    int idx;       // face id or boundary edge id
};

struct Chain {
    std::vector<int> edges;  // grid edge ids, consecutive along the chain
    int color;               // 0, 1 or 3
    std::array<ChainEnd, 2> ends;
};

// Maximal chains alternate (c, m, c, ..., c); each is one reduced edge.
inline std::vector<Chain> extract_chains(const HiveGrid& g, const ColorMap& col) {
    auto face_has_m = [&](int f) {
        for (int e : g.faces[f].edge)
            if (col[e] == kCM) return true;
        return false;
    };
    std::vector<bool> seen(g.edges.size(), false);
    std::vector<Chain> out;
    for (int k0 = 0; k0 < static_cast<int>(g.edges.size()); ++k0) {
        if (col[k0] == kCM || seen[k0]) continue;
        int c = col[k0];
        Chain ch;
        ch.edges = {k0};
        ch.color = c;
        for (int dir = 0; dir < 2; ++dir) {
            int cur = k0;
            int prevf = -1;
            bool first = true;
            while (true) {
                int f = -1;
                if (first) {
                    if (dir < static_cast<int>(g.edge_faces[cur].size()))
                        f = g.edge_faces[cur][dir];
                    first = false;
                } else {
                    for (int cand : g.edge_faces[cur])
                        if (cand != prevf) f = cand;
                }
                if (f < 0) {
                    ch.ends[dir] = ChainEnd{false, cur};
                    break;
                }
                if (!face_has_m(f)) {
                    ch.ends[dir] = ChainEnd{true, f};
                    break;
                }
                int medge = -1;
                for (int e : g.faces[f].edge)
                    if (col[e] == kCM) medge = e;
                int f2 = -1;
                for (int cand : g.edge_faces[medge])
                    if (cand != f) f2 = cand;
                if (f2 < 0) throw std::logic_error("m edge on boundary");
                int nxt = -1;
                for (int e : g.faces[f2].edge)
                    if (col[e] == c && e != cur) nxt = e;
                if (nxt < 0) throw std::logic_error("chain continuation missing");
                if (dir == 0)
                    ch.edges.push_back(nxt);
                else
                    ch.edges.insert(ch.edges.begin(), nxt);
                seen[nxt] = true;
                cur = nxt;
                prevf = f2;
            }
        }
        seen[k0] = true;
        out.push_back(std::move(ch));
    }
    return out;
}

// ---------------------------------------------------------- affine labels

// Affine expression c0 + sum_j u[j] * glue_var_j in the glue variables.
struct ALabel {
    Rat c0;
    std::map<int, Rat> u;

    bool operator==(const ALabel& o) const { return c0 == o.c0 && u == o.u; }
    bool operator!=(const ALabel& o) const { return !(*this == o); }
};
inline ALabel aconst(Rat c) { return ALabel{std::move(c), {}}; }
inline ALabel avar(int j) { return ALabel{Rat(0), {{j, Rat(1)}}}; }
inline ALabel acomplement(const ALabel& a) {  // 1 - a
    ALabel out{Rat(1) - a.c0, {}};
    for (const auto& [j, v] : a.u) out.u[j] = -v;
    return out;
}

// Boundary side slots of one triangle, given as the MODULI angle vectors
// (weakly decreasing); the third slot's reversal-complement is applied
// internally when converting to grid labels.
struct SlotLabels {
    std::vector<ALabel> alpha, beta, gamma;
};

inline std::vector<ALabel> slot_const(const std::vector<Rat>& v) {
    std::vector<ALabel> out;
    for (const auto& x : v) out.push_back(aconst(x));
    return out;
}
// Glue slot carrying the shared vector u (moduli, decreasing):
// entries u_base .. u_base+n-1.
inline std::vector<ALabel> slot_glue(int n, int u_base) {
    std::vector<ALabel> out;
    for (int j = 0; j < n; ++j) out.push_back(avar(u_base + j));
    return out;
}
// Glue slot carrying tilde(u) = (1-u_n, ..., 1-u_1).
inline std::vector<ALabel> slot_glue_tilde(int n, int u_base) {
    std::vector<ALabel> out;
    for (int j = 0; j < n; ++j) out.push_back(acomplement(avar(u_base + n - 1 - j)));
    return out;
}

// Per-edge boundary labels. Value multisets per run (hive triples
// (a, b, gh) with gh = reversal-complement of the gamma slot):
//   bottom {1-gh_1..1-gh_{n-d}}   Acut {gh_{n-d+1}..gh_n}
//   hyp    {b_{d+1}..b_n}         Bcut {1-b_1..1-b_d}
//   left   {a_{d+1}..a_n}         Ccut {1-a_1..1-a_d}
// Within every run, labels increase with edge height.
inline std::map<int, ALabel> hive_labels(const HiveGrid& g, const SlotLabels& slots) {
    const int n = g.n, d = g.d;
    const auto& a = slots.alpha;
    const auto& b = slots.beta;
    std::vector<ALabel> gh;
    for (int j = 0; j < n; ++j) gh.push_back(acomplement(slots.gamma[n - 1 - j]));

    std::map<std::string, std::vector<ALabel>> ordered;
    // ascending-value order, assuming decreasing moduli
    for (int j = 0; j < n - d; ++j) ordered["bottom"].push_back(acomplement(gh[j]));
    for (int j = n - 1; j >= n - d; --j) ordered["Acut"].push_back(gh[j]);
    for (int j = n - 1; j >= d; --j) ordered["hyp"].push_back(b[j]);
    for (int j = 0; j < d; ++j) ordered["Bcut"].push_back(acomplement(b[j]));
    for (int j = n - 1; j >= d; --j) ordered["left"].push_back(a[j]);
    for (int j = 0; j < d; ++j) ordered["Ccut"].push_back(acomplement(a[j]));

    std::map<int, ALabel> out;
    for (const auto& run : g.runs) {
        const auto& vals = ordered[run.name];
        if (vals.size() != run.edges.size()) throw std::logic_error("run size mismatch");
        for (size_t i = 0; i < run.edges.size(); ++i) out[run.edges[i]] = vals[i];
    }
    return out;
}

// ------------------------------------------------------------- joint cell

struct TriangleSpec {
    const HiveGrid* grid;
    ColorMap col;
    SlotLabels slots;
};

// A cell in H-representation over its free coordinates (all of which range
// in [0,1] boxes): ineqs are c0 + cf . x >= 0.
struct Cell {
    int dim = 0;
    int n_chain_vars = 0, nu = 0;
    std::vector<int> free_cols;                           // global column ids
    std::vector<bool> free_is_u;                          // per free coordinate
    std::vector<std::pair<Rat, std::vector<Rat>>> expr;   // per global column
    std::vector<std::pair<Rat, std::vector<Rat>>> ineqs;
    std::vector<int> pivot_u_cols;  // glue columns eliminated by the equalities
};

namespace detail {
struct SparseExpr {
    Rat c0;
    std::map<int, Rat> cols;
};
inline void axpy(SparseExpr& a, const SparseExpr& b, const Rat& s) {
    a.c0 += s * b.c0;
    for (const auto& [j, v] : b.cols) {
        Rat& slot = a.cols[j];
        slot += s * v;
        if (slot == 0) a.cols.erase(j);
    }
}
}  // namespace detail

// Build the joint system of one or more triangles sharing nu glue variables.
// Returns nullopt when the cell is empty for structural reasons (conflicting
// boundary pins or inconsistent equalities). col_order optionally permutes
// the pivot-search order of the columns (a different cotree choice).
inline std::optional<Cell> joint_cell(const std::vector<TriangleSpec>& tris, int nu,
                                      const std::vector<int>* col_order = nullptr) {
    using detail::SparseExpr;
    struct TriData {
        std::vector<Chain> chains;
        std::vector<int> e2c;         // grid edge -> chain id (-1 for m edges)
        std::map<int, ALabel> pins;   // chain id -> pinned label
        int base = 0;                 // first variable id of this triangle
    };
    std::vector<TriData> tds(tris.size());
    int nvars = 0;
    std::vector<std::pair<int, int>> var_of;  // (tri, chain)
    for (size_t ti = 0; ti < tris.size(); ++ti) {
        const auto& g = *tris[ti].grid;
        auto& td = tds[ti];
        td.chains = extract_chains(g, tris[ti].col);
        td.e2c.assign(g.edges.size(), -1);
        for (int i = 0; i < static_cast<int>(td.chains.size()); ++i)
            for (int e : td.chains[i].edges) td.e2c[e] = i;
        auto labels = hive_labels(g, tris[ti].slots);
        for (int i = 0; i < static_cast<int>(td.chains.size()); ++i)
            for (int e : td.chains[i].edges) {
                auto it = labels.find(e);
                if (it == labels.end()) continue;
                auto pit = td.pins.find(i);
                if (pit != td.pins.end()) {
                    if (pit->second != it->second) return std::nullopt;  // pin conflict
                } else {
                    td.pins[i] = it->second;
                }
            }
        td.base = nvars;
        // every chain gets a variable column; pinned chains get an equality row
        nvars += static_cast<int>(td.chains.size());
    }
    const int tot = nvars + nu;

    auto chain_expr = [&](size_t ti, int i) {
        SparseExpr e;
        e.c0 = 0;
        e.cols[tds[ti].base + i] = 1;
        return e;
    };
    auto label_expr = [&](const ALabel& L) {
        SparseExpr e;
        e.c0 = L.c0;
        for (const auto& [j, v] : L.u) e.cols[nvars + j] = v;
        return e;
    };

    std::vector<SparseExpr> rows;   // == 0
    std::vector<SparseExpr> ineqs;  // >= 0
    for (size_t ti = 0; ti < tris.size(); ++ti) {
        const auto& g = *tris[ti].grid;
        const auto& col = tris[ti].col;
        auto& td = tds[ti];
        // pins: chain - label == 0
        for (const auto& [i, L] : td.pins) {
            SparseExpr e = chain_expr(ti, i);
            detail::axpy(e, label_expr(L), Rat(-1));
            rows.push_back(std::move(e));
        }
        auto edge_expr = [&](int kk) {
            // m-edge label via the adjacent face sum = 1
            if (col[kk] != kCM) return chain_expr(ti, td.e2c[kk]);
            int f = g.edge_faces[kk][0];
            SparseExpr e;
            e.c0 = 1;
            for (int x : g.faces[f].edge) {
                if (col[x] == kCM) continue;
                detail::axpy(e, chain_expr(ti, td.e2c[x]), Rat(-1));
            }
            return e;
        };
        // trivalent (m-free) face equalities: sum of its chain heights = 1
        for (const auto& f : g.faces) {
            bool has_m = false;
            for (int e : f.edge) has_m = has_m || (col[e] == kCM);
            if (has_m) continue;
            SparseExpr e;
            e.c0 = -1;
            for (int k : f.edge) detail::axpy(e, chain_expr(ti, td.e2c[k]), Rat(1));
            rows.push_back(std::move(e));
        }
        // box 0 <= height <= 1 per chain
        for (int i = 0; i < static_cast<int>(td.chains.size()); ++i) {
            SparseExpr e = chain_expr(ti, i);
            ineqs.push_back(e);
            SparseExpr f;
            f.c0 = 1;
            detail::axpy(f, e, Rat(-1));
            ineqs.push_back(std::move(f));
        }
        // m-edge labels are nonnegative
        for (int kk = 0; kk < static_cast<int>(g.edges.size()); ++kk)
            if (col[kk] == kCM) ineqs.push_back(edge_expr(kk));
        // cover/rhombus constraints: for an interior non-m middle edge of
        // type tau, the opposite pair of type (tau-1) mod 3 is ordered by
        // grid height: label(higher) >= label(lower)
        for (int kk = 0; kk < static_cast<int>(g.edges.size()); ++kk) {
            if (col[kk] == kCM || g.edge_faces[kk].size() != 2) continue;
            int t = (g.edges[kk].type + 2) % 3;
            int o1 = -1, o2 = -1;
            for (int x : g.faces[g.edge_faces[kk][0]].edge)
                if (x != kk && g.edges[x].type == t) o1 = x;
            for (int x : g.faces[g.edge_faces[kk][1]].edge)
                if (x != kk && g.edges[x].type == t) o2 = x;
            if (o1 < 0 || o2 < 0) continue;
            int hi = g.edges[o1].h > g.edges[o2].h ? o1 : o2;
            int lo = hi == o1 ? o2 : o1;
            SparseExpr e = edge_expr(hi);
            detail::axpy(e, edge_expr(lo), Rat(-1));
            ineqs.push_back(std::move(e));
        }
    }
    // glue variables range in [0,1]
    for (int j = 0; j < nu; ++j) {
        SparseExpr e;
        e.c0 = 0;
        e.cols[nvars + j] = 1;
        ineqs.push_back(e);
        SparseExpr f;
        f.c0 = 1;
        f.cols[nvars + j] = -1;
        ineqs.push_back(std::move(f));
    }

    // dense RREF over the chosen column order
    std::vector<int> order(tot);
    for (int c = 0; c < tot; ++c) order[c] = c;
    if (col_order) {
        if (static_cast<int>(col_order->size()) != tot)
            throw std::invalid_argument("col_order size mismatch");
        order = *col_order;
    }
    const int m = static_cast<int>(rows.size());
    std::vector<std::vector<Rat>> A(m, std::vector<Rat>(tot, Rat(0)));
    std::vector<Rat> rhs(m, Rat(0));
    for (int r = 0; r < m; ++r) {
        for (const auto& [j, v] : rows[r].cols) A[r][j] = v;
        rhs[r] = -rows[r].c0;
    }
    std::vector<int> piv;
    std::vector<bool> is_piv(tot, false);
    int rr = 0;
    for (int oc = 0; oc < tot && rr < m; ++oc) {
        int c = order[oc];
        int p = -1;
        for (int r = rr; r < m; ++r)
            if (A[r][c] != 0) {
                p = r;
                break;
            }
        if (p < 0) continue;
        std::swap(A[rr], A[p]);
        std::swap(rhs[rr], rhs[p]);
        Rat f = A[rr][c];
        for (auto& x : A[rr]) x /= f;
        rhs[rr] /= f;
        for (int r2 = 0; r2 < m; ++r2) {
            if (r2 == rr || A[r2][c] == 0) continue;
            Rat f2 = A[r2][c];
            for (int j = 0; j < tot; ++j) A[r2][j] -= f2 * A[rr][j];
            rhs[r2] -= f2 * rhs[rr];
        }
        piv.push_back(c);
        is_piv[c] = true;
        ++rr;
    }
    for (int r = rr; r < m; ++r)
        if (rhs[r] != 0) return std::nullopt;  // inconsistent

    Cell cell;
    cell.n_chain_vars = nvars;
    cell.nu = nu;
    for (int oc = 0; oc < tot; ++oc) {
        int c = order[oc];
        if (!is_piv[c]) {
            cell.free_cols.push_back(c);
            cell.free_is_u.push_back(c >= nvars);
        }
    }
    cell.dim = static_cast<int>(cell.free_cols.size());
    std::vector<int> free_index(tot, -1);
    for (int j = 0; j < cell.dim; ++j) free_index[cell.free_cols[j]] = j;
    cell.expr.assign(tot, {Rat(0), std::vector<Rat>(cell.dim, Rat(0))});
    for (int r = 0; r < static_cast<int>(piv.size()); ++r) {
        int c = piv[r];
        cell.expr[c].first = rhs[r];
        for (int j = 0; j < cell.dim; ++j)
            cell.expr[c].second[j] = -A[r][cell.free_cols[j]];
        if (c >= nvars) cell.pivot_u_cols.push_back(c);
    }
    for (int j = 0; j < cell.dim; ++j) cell.expr[cell.free_cols[j]].second[j] = 1;

    for (const auto& e : ineqs) {
        Rat c0 = e.c0;
        std::vector<Rat> cf(cell.dim, Rat(0));
        for (const auto& [col_i, coef] : e.cols) {
            c0 += coef * cell.expr[col_i].first;
            for (int j = 0; j < cell.dim; ++j)
                cf[j] += coef * cell.expr[col_i].second[j];
        }
        cell.ineqs.emplace_back(std::move(c0), std::move(cf));
    }
    return cell;
}

// Single-triangle convenience with numeric boundary (moduli triples).
inline std::optional<Cell> triangle_cell(const HiveGrid& g, const ColorMap& col,
                                         const std::vector<Rat>& alpha,
                                         const std::vector<Rat>& beta,
                                         const std::vector<Rat>& gamma,
                                         const std::vector<int>* col_order = nullptr) {
    TriangleSpec spec{&g, col, SlotLabels{slot_const(alpha), slot_const(beta),
                                          slot_const(gamma)}};
    return joint_cell({spec}, 0, col_order);
}

}  // namespace hv
