#include "qhgeo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qhgeo/errors.hpp"

namespace qhgeo {
namespace {

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#bcbd22"};
constexpr int kPaletteSize = 8;

struct Box {
    double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
    bool empty = true;
    void add(Vec2 p) {
        if (empty) {
            xlo = xhi = p.x;
            ylo = yhi = p.y;
            empty = false;
            return;
        }
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
    }
};

void fmt(std::string& s, const char* f, double a, double b) {
    char buf[80];
    std::snprintf(buf, sizeof buf, f, a, b);
    s += buf;
}

}  // namespace

Polyline sample_path(const GeodesicPath& g, int n) {
    if (n < 2) throw InputError("sample_path: need at least 2 samples");
    Polyline p;
    p.vertices.reserve(n + 1);
    for (int k = 0; k < n; ++k)
        p.vertices.push_back(g.point(g.total_qh_len * k / n));
    p.vertices.push_back(g.end());
    return p;
}

std::string render_svg(const VoronoiDomain& d, const std::vector<GeodesicPath>& paths,
                       const std::vector<Polyline>& polylines, const SvgOptions& opts) {
    if (!(opts.units_per_length > 0.0) || !(opts.margin >= 0.0))
        throw InputError("render_svg: bad scale or margin");

    std::vector<Polyline> sampled;
    sampled.reserve(paths.size());
    for (const auto& g : paths) sampled.push_back(sample_path(g, opts.samples_per_path));

    Box box;
    for (const Vec2& p : d.nuclei()) box.add(p);
    for (const auto& pl : sampled)
        for (const Vec2& v : pl.vertices) box.add(v);
    for (const auto& pl : polylines)
        for (const Vec2& v : pl.vertices) box.add(v);
    if (box.empty) box.add({0.0, 0.0});
    box.add({box.xlo - opts.margin, box.ylo - opts.margin});
    box.add({box.xhi + opts.margin, box.yhi + opts.margin});

    double U = opts.units_per_length;
    double W = (box.xhi - box.xlo) * U, H = (box.yhi - box.ylo) * U;
    // svg y runs down; flip so the domain keeps its orientation
    auto X = [&](double x) { return (x - box.xlo) * U; };
    auto Y = [&](double y) { return (box.yhi - y) * U; };

    std::string s;
    char head[200];
    std::snprintf(head, sizeof head,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %.3f %.3f\">\n",
                  W, H);
    s += head;

    if (opts.draw_edges) {
        s += "<g id=\"edges\" stroke=\"#999999\" stroke-width=\"2\" fill=\"none\">\n";
        // clip length that safely covers the view box from any interior point
        double L = 2.0 * ((box.xhi - box.xlo) + (box.yhi - box.ylo) + 1.0);
        for (const VoronoiEdge& e : d.edges()) {
            double lo = std::max(e.lo, -L), hi = std::min(e.hi, L);
            if (!(hi > lo)) continue;
            Vec2 a = e.point + lo * e.dir, b = e.point + hi * e.dir;
            s += "<line ";
            fmt(s, "x1=\"%.3f\" y1=\"%.3f\" ", X(a.x), Y(a.y));
            fmt(s, "x2=\"%.3f\" y2=\"%.3f\"/>\n", X(b.x), Y(b.y));
        }
        s += "</g>\n";
    }
    if (opts.draw_nuclei) {
        s += "<g id=\"nuclei\" fill=\"#000000\">\n";
        for (const Vec2& p : d.nuclei()) {
            s += "<circle ";
            fmt(s, "cx=\"%.3f\" cy=\"%.3f\" r=\"5\"/>\n", X(p.x), Y(p.y));
        }
        s += "</g>\n";
    }
    auto emit_polyline = [&](const Polyline& pl, const char* color) {
        s += "<polyline fill=\"none\" stroke-width=\"3\" stroke=\"";
        s += color;
        s += "\" points=\"";
        for (size_t k = 0; k < pl.vertices.size(); ++k) {
            if (k) s += ' ';
            fmt(s, "%.3f,%.3f", X(pl.vertices[k].x), Y(pl.vertices[k].y));
        }
        if (pl.closed && pl.vertices.size() > 1) {
            s += ' ';
            fmt(s, "%.3f,%.3f", X(pl.vertices[0].x), Y(pl.vertices[0].y));
        }
        s += "\"/>\n";
    };
    s += "<g id=\"paths\">\n";
    for (size_t i = 0; i < sampled.size(); ++i)
        emit_polyline(sampled[i], kPalette[i % kPaletteSize]);
    s += "</g>\n<g id=\"polylines\">\n";
    for (size_t i = 0; i < polylines.size(); ++i)
        emit_polyline(polylines[i], kPalette[(sampled.size() + i) % kPaletteSize]);
    s += "</g>\n</svg>\n";
    return s;
}

}  // namespace qhgeo
