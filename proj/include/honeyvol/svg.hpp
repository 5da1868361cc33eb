#pragma once
// Deterministic SVG emission for grid colorings and realized honeycombs.
// Palette: color 0 red, color 1 blue, color 3 black, contracted chains green.

#include <iomanip>
#include <sstream>
#include <string>

#include "honeyvol/hivegrid.hpp"
#include "honeyvol/honeycombs.hpp"

namespace hv {
namespace svgdetail {

inline const char* palette(int c) {
    switch (c) {
        case kC0: return "#d62728";  // red
        case kC1: return "#1f77b4";  // blue
        case kC3: return "#000000";  // black
        default: return "#2ca02c";   // green (m)
    }
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << x;
    return os.str();
}

struct Canvas {
    std::ostringstream body;
    double minx = 1e9, miny = 1e9, maxx = -1e9, maxy = -1e9;
    void line(double x1, double y1, double x2, double y2, const char* color,
              double width) {
        minx = std::min({minx, x1, x2});
        maxx = std::max({maxx, x1, x2});
        miny = std::min({miny, y1, y2});
        maxy = std::max({maxy, y1, y2});
        body << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\""
             << fmt(x2) << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << color
             << "\" stroke-width=\"" << fmt(width) << "\"/>\n";
    }
    void text(double x, double y, const std::string& s) {
        body << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y)
             << "\" font-size=\"4\" fill=\"#555555\">" << s << "</text>\n";
    }
    std::string finish() const {
        double pad = 10;
        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\""
           << fmt(minx - pad) << " " << fmt(miny - pad) << " "
           << fmt(maxx - minx + 2 * pad) << " " << fmt(maxy - miny + 2 * pad)
           << "\">\n"
           << body.str() << "</svg>\n";
        return os.str();
    }
};

}  // namespace svgdetail

// Grid with a coloring; vertices (r,s) drawn in the standard triangular
// lattice embedding, y increasing downward (SVG convention).
inline std::string render_grid(const HiveGrid& g, const ColorMap& col,
                               bool labels = false) {
    const double s3 = std::sqrt(3.0), scale = 24.0;
    auto px = [&](int r, int s) { return scale * (r + 0.5 * s); };
    auto py = [&](int r, int s) { return -scale * (s3 / 2.0) * s; };
    svgdetail::Canvas cv;
    for (size_t e = 0; e < g.edges.size(); ++e) {
        const auto& ed = g.edges[e];
        auto [r1, s1] = ed.va;
        auto [r2, s2] = ed.vb;
        cv.line(px(r1, s1), py(r1, s1), px(r2, s2), py(r2, s2),
                svgdetail::palette(col[e]), col[e] == kCM ? 2.4 : 1.2);
        if (labels)
            cv.text((px(r1, s1) + px(r2, s2)) / 2, (py(r1, s1) + py(r2, s2)) / 2,
                    std::to_string(e));
    }
    return cv.finish();
}

// Realized honeycomb in the closed triangle; barycentric coordinates mapped
// to an equilateral triangle of side `scale`.
inline std::string render_honeycomb(const Honeycomb& h, bool labels = false) {
    const double s3 = std::sqrt(3.0), scale = 240.0;
    // corners for coordinates (c0, c1, c2)
    const double Ax = 0, Ay = 0, Bx = scale, By = 0, Cx = scale / 2,
                 Cy = -scale * s3 / 2;
    auto px = [&](const std::array<Rat, 3>& c) {
        return to_double(c[0]) * Ax + to_double(c[1]) * Bx + to_double(c[2]) * Cx;
    };
    auto py = [&](const std::array<Rat, 3>& c) {
        return to_double(c[0]) * Ay + to_double(c[1]) * By + to_double(c[2]) * Cy;
    };
    svgdetail::Canvas cv;
    cv.line(Ax, Ay, Bx, By, "#cccccc", 0.8);
    cv.line(Bx, By, Cx, Cy, "#cccccc", 0.8);
    cv.line(Cx, Cy, Ax, Ay, "#cccccc", 0.8);
    for (size_t i = 0; i < h.segments.size(); ++i) {
        const auto& sg = h.segments[i];
        cv.line(px(sg.a), py(sg.a), px(sg.b), py(sg.b), svgdetail::palette(sg.color),
                1.6);
        if (labels)
            cv.text((px(sg.a) + px(sg.b)) / 2, (py(sg.a) + py(sg.b)) / 2,
                    std::to_string(i));
    }
    return cv.finish();
}

}  // namespace hv
