#pragma once
// Hexagonal hive grid H_{d,n}: vertices, typed edges with heights, triangular
// faces, the six boundary runs, and enumeration/validation of color maps.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hv {

struct InvalidSize : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Edge colors. kCM is the merge color ('m').
enum : int { kC0 = 0, kC1 = 1, kC3 = 3, kCM = 4 };

inline char color_char(int c) {
    switch (c) {
        case kC0: return '0';
        case kC1: return '1';
        case kC3: return '3';
        case kCM: return 'm';
    }
    throw std::invalid_argument("bad color");
}
inline int color_from_char(char ch) {
    switch (ch) {
        case '0': return kC0;
        case '1': return kC1;
        case '3': return kC3;
        case 'm': return kCM;
    }
    throw std::invalid_argument(std::string("bad color char: ") + ch);
}

struct GridEdge {
    int type;       // 0,1,2
    int r, s;       // anchor vertex
    int h;          // height: type0 -> n+d-1-r-s, type1 -> r, type2 -> s
    std::pair<int, int> va, vb;  // endpoint lattice coordinates (r,s)
};

struct GridFace {
    bool up;  // upward or downward triangle
    int r, s;
    std::array<int, 3> edge;  // edge indices ordered by type [t0, t1, t2]
};

struct BoundaryRun {
    std::string name;         // bottom, Bcut, hyp, Ccut, left, Acut
    std::vector<int> edges;   // edge indices, in increasing height order
    int color;                // forced boundary color (0 on straight, 1 on cuts)
};

class HiveGrid {
  public:
    int n = 0, d = 0;
    std::vector<std::pair<int, int>> verts;
    std::vector<GridEdge> edges;
    std::vector<GridFace> faces;                  // canonical row-major order
    std::vector<std::vector<int>> edge_faces;     // per edge: adjacent face ids
    std::vector<BoundaryRun> runs;                // fixed order: bottom, Bcut, hyp, Ccut, left, Acut

    int edge_index(int t, int r, int s) const {
        auto it = eindex_.find(key(t, r, s));
        return it == eindex_.end() ? -1 : it->second;
    }
    bool is_boundary_edge(int e) const { return edge_faces[e].size() == 1; }

    friend HiveGrid build_grid(int n, int d);

  private:
    static std::int64_t key(int t, int r, int s) {
        return (static_cast<std::int64_t>(t) << 40) ^
               (static_cast<std::int64_t>(r + 512) << 20) ^ (s + 512);
    }
    std::map<std::int64_t, int> eindex_;
};

// The hexagon {(r,s): d <= r+s <= n+d, r <= n, s <= n}.
inline HiveGrid build_grid(int n, int d) {
    if (n < 2 || d < 0 || d > n) throw InvalidSize("build_grid: need n >= 2, 0 <= d <= n");
    HiveGrid g;
    g.n = n;
    g.d = d;
    auto in_grid = [&](int r, int s) {
        return r >= 0 && s >= 0 && r <= n && s <= n && r + s <= n + d && r + s >= d;
    };
    for (int r = 0; r <= n; ++r)
        for (int s = 0; s <= n; ++s)
            if (in_grid(r, s)) g.verts.emplace_back(r, s);

    auto add_edge = [&](int t, int r, int s, std::pair<int, int> a,
                        std::pair<int, int> b, int h) {
        if (!in_grid(a.first, a.second) || !in_grid(b.first, b.second)) return;
        GridEdge e{t, r, s, h, a, b};
        g.eindex_[HiveGrid::key(t, r, s)] = static_cast<int>(g.edges.size());
        g.edges.push_back(e);
    };
    // canonical edge order: all type-0, then type-1, then type-2, row-major
    for (int t = 0; t < 3; ++t)
        for (int r = 0; r <= n; ++r)
            for (int s = 0; s <= n + d; ++s) {
                if (!in_grid(r, s)) continue;
                if (t == 0) add_edge(0, r, s, {r, s}, {r + 1, s}, n + d - 1 - r - s);
                if (t == 1) add_edge(1, r, s, {r, s}, {r + 1, s - 1}, r);
                if (t == 2) add_edge(2, r, s, {r, s}, {r, s + 1}, s);
            }

    // faces: up(r,s) = {t0(r,s), t1(r,s+1), t2(r,s)};
    //        down(r,s) = {t0(r,s+1), t1(r,s+1), t2(r+1,s)}
    for (int s = -1; s <= n + d; ++s)
        for (int r = -1; r <= n + d; ++r)
            for (int up = 0; up < 2; ++up) {  // canonical: down before up
                std::array<int, 3> idx;
                if (up) {
                    idx = {g.edge_index(0, r, s), g.edge_index(1, r, s + 1),
                           g.edge_index(2, r, s)};
                } else {
                    idx = {g.edge_index(0, r, s + 1), g.edge_index(1, r, s + 1),
                           g.edge_index(2, r + 1, s)};
                }
                if (idx[0] < 0 || idx[1] < 0 || idx[2] < 0) continue;
                g.faces.push_back(GridFace{up == 1, r, s, idx});
            }
    g.edge_faces.assign(g.edges.size(), {});
    for (int f = 0; f < static_cast<int>(g.faces.size()); ++f)
        for (int e : g.faces[f].edge) g.edge_faces[e].push_back(f);

    // six boundary runs, edges listed in increasing height order
    auto mk_run = [&](const std::string& name, std::vector<int> es, int color) {
        std::sort(es.begin(), es.end(),
                  [&](int a, int b) { return g.edges[a].h < g.edges[b].h; });
        g.runs.push_back(BoundaryRun{name, std::move(es), color});
    };
    std::vector<int> bottom, bcut, hyp, ccut, left, acut;
    for (int r = d; r < n; ++r) bottom.push_back(g.edge_index(0, r, 0));
    for (int s = 0; s < d; ++s) bcut.push_back(g.edge_index(2, n, s));
    for (int r = d; r < n; ++r) hyp.push_back(g.edge_index(1, r, n + d - r));
    for (int r = 0; r < d; ++r) ccut.push_back(g.edge_index(0, r, n));
    for (int s = d; s < n; ++s) left.push_back(g.edge_index(2, 0, s));
    for (int r = 0; r < d; ++r) acut.push_back(g.edge_index(1, r, d - r));
    mk_run("bottom", bottom, kC0);
    mk_run("Bcut", bcut, kC1);
    mk_run("hyp", hyp, kC0);
    mk_run("Ccut", ccut, kC1);
    mk_run("left", left, kC0);
    mk_run("Acut", acut, kC1);
    for (const auto& run : g.runs)
        for (int e : run.edges)
            if (e < 0) throw std::logic_error("boundary run edge missing");
    return g;
}

// The six labeled boundary segments with edges in decreasing height order
// (the label lists are conventionally quoted in this order).
inline std::vector<BoundaryRun> boundary_segments(const HiveGrid& g) {
    std::vector<BoundaryRun> out = g.runs;
    for (auto& run : out) std::reverse(run.edges.begin(), run.edges.end());
    return out;
}

// One color per edge.
using ColorMap = std::vector<int>;

// Clockwise color word of a face is (c[t2], c[t1], c[t0]); it must be a
// cyclic rotation of (0,0,0), (1,1,1), (1,0,3) or (0,1,m).
inline const std::vector<std::array<int, 3>>& allowed_face_words() {
    static const std::vector<std::array<int, 3>> words = [] {
        std::vector<std::array<int, 3>> out;
        const std::array<std::array<int, 3>, 4> base = {
            std::array<int, 3>{kC0, kC0, kC0}, {kC1, kC1, kC1},
            {kC1, kC0, kC3}, {kC0, kC1, kCM}};
        for (const auto& w : base)
            for (int k = 0; k < 3; ++k) {
                std::array<int, 3> rot{w[k % 3], w[(k + 1) % 3], w[(k + 2) % 3]};
                if (std::find(out.begin(), out.end(), rot) == out.end())
                    out.push_back(rot);
            }
        return out;
    }();
    return words;
}

struct ColorViolation {
    bool ok = true;
    int face = -1;
    std::string detail;
};

inline ColorViolation validate_color_map(const HiveGrid& g, const ColorMap& col) {
    if (col.size() != g.edges.size())
        return {false, -1, "color map has wrong edge count"};
    const auto& allowed = allowed_face_words();
    for (int f = 0; f < static_cast<int>(g.faces.size()); ++f) {
        std::array<int, 3> w{col[g.faces[f].edge[2]], col[g.faces[f].edge[1]],
                             col[g.faces[f].edge[0]]};
        if (std::find(allowed.begin(), allowed.end(), w) == allowed.end()) {
            std::string detail = "face word (";
            detail += color_char(w[0]);
            detail += color_char(w[1]);
            detail += color_char(w[2]);
            detail += ") not allowed";
            return {false, f, detail};
        }
    }
    for (const auto& run : g.runs)
        for (int e : run.edges)
            if (col[e] != run.color)
                return {false, -1, "boundary color mismatch on run " + run.name};
    return {};
}

// Exhaustive depth-first enumeration over faces in canonical order; the
// boundary colors are pinned first. Deterministic output order.
inline std::vector<ColorMap> enumerate_color_maps(const HiveGrid& g) {
    const int kUnset = -1;
    ColorMap col(g.edges.size(), kUnset);
    for (const auto& run : g.runs)
        for (int e : run.edges) col[e] = run.color;
    const auto& allowed = allowed_face_words();

    auto face_ok = [&](int f) {
        // partial check: some edges may be unset
        std::array<int, 3> w{col[g.faces[f].edge[2]], col[g.faces[f].edge[1]],
                             col[g.faces[f].edge[0]]};
        for (const auto& a : allowed) {
            bool match = true;
            for (int i = 0; i < 3; ++i)
                if (w[i] != kUnset && w[i] != a[i]) {
                    match = false;
                    break;
                }
            if (match) return true;
        }
        return false;
    };

    std::vector<ColorMap> out;
    const std::array<int, 4> palette{kC0, kC1, kC3, kCM};
    std::function<void(int)> dfs = [&](int fi) {
        if (fi == static_cast<int>(g.faces.size())) {
            out.push_back(col);
            return;
        }
        std::vector<int> missing;
        for (int e : g.faces[fi].edge)
            if (col[e] == kUnset) missing.push_back(e);
        if (missing.empty()) {
            if (face_ok(fi)) dfs(fi + 1);
            return;
        }
        int k = static_cast<int>(missing.size());
        std::vector<int> pick(k, 0);
        std::function<void(int)> assign = [&](int pos) {
            if (pos == k) {
                if (face_ok(fi)) dfs(fi + 1);
                return;
            }
            for (int c : palette) {
                col[missing[pos]] = c;
                if (face_ok(fi)) assign(pos + 1);
            }
            col[missing[pos]] = kUnset;
        };
        assign(0);
    };
    dfs(0);
    return out;
}

inline int m_edge_count(const ColorMap& col) {
    int c = 0;
    for (int x : col) c += (x == kCM);
    return c;
}

// Serialization: header line "# hivegrid n d n_edges", then "edgeId:color".
inline std::string serialize_color_map(const HiveGrid& g, const ColorMap& col) {
    std::ostringstream os;
    os << "# hivegrid " << g.n << " " << g.d << " " << g.edges.size() << "\n";
    for (size_t e = 0; e < col.size(); ++e)
        os << e << ":" << color_char(col[e]) << "\n";
    return os.str();
}

inline ColorMap parse_color_map(const HiveGrid& g, const std::string& text) {
    ColorMap col(g.edges.size(), -1);
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto colon = line.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("bad line: " + line);
        int e = std::stoi(line.substr(0, colon));
        if (e < 0 || e >= static_cast<int>(col.size()))
            throw std::invalid_argument("edge id out of range");
        col[e] = color_from_char(line[colon + 1]);
    }
    for (int c : col)
        if (c < 0) throw std::invalid_argument("color map incomplete");
    return col;
}

}  // namespace hv
