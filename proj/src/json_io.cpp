#include "qhgeo/json_io.hpp"

#include <cmath>
#include <cstdio>

#include "qhgeo/errors.hpp"

namespace qhgeo {
namespace {

ordered_json vec_json(Vec2 v) { return ordered_json::array({v.x, v.y}); }

Vec2 vec_from(const ordered_json& j) {
    if (!j.is_array() || j.size() != 2)
        throw InputError("json: expected a point as [x, y]");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

const char* kind_str(EventKind k) {
    switch (k) {
        case EventKind::crossing: return "crossing";
        case EventKind::touching: return "touching";
        case EventKind::sliding_start: return "sliding_start";
        case EventKind::sliding_end: return "sliding_end";
        case EventKind::corner: return "corner";
    }
    return "crossing";
}

EventKind kind_from(const std::string& s) {
    if (s == "crossing") return EventKind::crossing;
    if (s == "touching") return EventKind::touching;
    if (s == "sliding_start") return EventKind::sliding_start;
    if (s == "sliding_end") return EventKind::sliding_end;
    if (s == "corner") return EventKind::corner;
    throw InputError("json: unknown event kind '" + s + "'");
}

const char* loc_str(CellLocation::Kind k) {
    switch (k) {
        case CellLocation::Kind::interior: return "interior";
        case CellLocation::Kind::edge: return "edge";
        case CellLocation::Kind::corner: return "corner";
    }
    return "interior";
}

CellLocation::Kind loc_from(const std::string& s) {
    if (s == "interior") return CellLocation::Kind::interior;
    if (s == "edge") return CellLocation::Kind::edge;
    if (s == "corner") return CellLocation::Kind::corner;
    throw InputError("json: unknown location kind '" + s + "'");
}

// segment intersection by orientation signs, shared endpoints excluded
bool segs_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    auto o = [](Vec2 p, Vec2 q, Vec2 r) {
        double v = cross(q - p, r - p);
        return v > 0.0 ? 1 : v < 0.0 ? -1 : 0;
    };
    int o1 = o(a, b, c), o2 = o(a, b, d), o3 = o(c, d, a), o4 = o(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    auto on = [](Vec2 p, Vec2 q, Vec2 r) {
        return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) &&
               std::min(p.y, q.y) <= r.y && r.y <= std::max(p.y, q.y);
    };
    if (o1 == 0 && on(a, b, c)) return true;
    if (o2 == 0 && on(a, b, d)) return true;
    if (o3 == 0 && on(c, d, a)) return true;
    if (o4 == 0 && on(c, d, b)) return true;
    return false;
}

}  // namespace

ordered_json domain_to_json(const VoronoiDomain& d) {
    ordered_json j;
    j["nuclei"] = ordered_json::array();
    for (const Vec2& p : d.nuclei()) j["nuclei"].push_back(vec_json(p));
    return j;
}

void require_simple_polygon(const Polyline& poly) {
    const auto& v = poly.vertices;
    if (!poly.closed) throw InputError("polygon: must be closed");
    if (v.size() < 3) throw InputError("polygon: needs at least 3 vertices");
    size_t n = v.size();
    for (size_t i = 0; i < n; ++i)
        if (dist(v[i], v[(i + 1) % n]) == 0.0)
            throw InputError("polygon: repeated consecutive vertex");
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            // skip the shared-endpoint neighbors
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segs_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                throw InputError("polygon: self-intersecting");
        }
    }
}

std::vector<Vec2> sample_polygon(const Polyline& poly, double samples_per_unit,
                                 int level) {
    if (!(samples_per_unit > 0.0) || !std::isfinite(samples_per_unit))
        throw InputError("polygon: samples_per_unit must be positive");
    if (level < 0 || level > 24) throw InputError("polygon: level out of range");
    require_simple_polygon(poly);
    std::vector<Vec2> out;
    size_t n = poly.vertices.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = poly.vertices[i], b = poly.vertices[(i + 1) % n];
        double len = dist(a, b);
        long long base = std::max(1LL, (long long)std::ceil(len * samples_per_unit));
        long long cnt = base << level;
        for (long long k = 0; k < cnt; ++k) {
            double t = (double)k / (double)cnt;
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

VoronoiDomain domain_from_json(const ordered_json& j) {
    if (j.contains("nuclei")) {
        std::vector<Vec2> pts;
        for (const auto& e : j.at("nuclei")) pts.push_back(vec_from(e));
        return VoronoiDomain::build(pts);
    }
    if (j.contains("polygon")) {
        Polyline poly = polyline_from_json(j.at("polygon"));
        double spu = j.at("samples_per_unit").get<double>();
        return VoronoiDomain::build(sample_polygon(poly, spu));
    }
    throw InputError("domain json: need \"nuclei\" or \"polygon\"");
}

ordered_json path_to_json(const GeodesicPath& g) {
    ordered_json j;
    j["start"] = vec_json(g.start);
    j["length"] = g.total_qh_len;
    j["pieces"] = ordered_json::array();
    for (const PathPiece& pc : g.pieces) {
        ordered_json p;
        if (pc.kind == PathPiece::Kind::spiral) {
            p["type"] = "spiral";
            p["cell"] = pc.cell;
            p["center"] = vec_json(pc.spiral.center);
            p["rho0"] = pc.spiral.rho0;
            p["theta0"] = pc.spiral.theta0;
            p["alpha"] = pc.spiral.alpha;
            p["len"] = pc.spiral.qh_len;
        } else {
            p["type"] = "straight";
            p["edge"] = pc.straight.edge;
            p["foot"] = vec_json(pc.straight.foot);
            p["dir"] = vec_json(pc.straight.dir);
            p["h"] = pc.straight.h;
            p["s_start"] = pc.straight.s_start;
            p["s_end"] = pc.straight.s_end;
            p["len"] = pc.straight.qh_len;
        }
        j["pieces"].push_back(std::move(p));
    }
    j["events"] = ordered_json::array();
    for (const ShootEvent& ev : g.events) {
        ordered_json e;
        e["t"] = ev.t;
        e["kind"] = kind_str(ev.kind);
        e["loc"] = loc_str(ev.location.kind);
        e["cell"] = ev.location.cell;
        e["edge"] = ev.location.edge;
        e["corner"] = ev.location.corner;
        e["cell_from"] = ev.cell_from;
        e["cell_to"] = ev.cell_to;
        e["flagged"] = ev.flagged;
        j["events"].push_back(std::move(e));
    }
    return j;
}

GeodesicPath path_from_json(const ordered_json& j) {
    GeodesicPath g;
    g.start = vec_from(j.at("start"));
    g.total_qh_len = j.at("length").get<double>();
    for (const auto& p : j.at("pieces")) {
        PathPiece pc;
        std::string type = p.at("type").get<std::string>();
        if (type == "spiral") {
            pc.kind = PathPiece::Kind::spiral;
            pc.cell = p.at("cell").get<int>();
            pc.spiral.center = vec_from(p.at("center"));
            pc.spiral.rho0 = p.at("rho0").get<double>();
            pc.spiral.theta0 = p.at("theta0").get<double>();
            pc.spiral.alpha = p.at("alpha").get<double>();
            pc.spiral.qh_len = p.at("len").get<double>();
        } else if (type == "straight") {
            pc.kind = PathPiece::Kind::straight;
            pc.straight.edge = p.at("edge").get<int>();
            pc.straight.foot = vec_from(p.at("foot"));
            pc.straight.dir = vec_from(p.at("dir"));
            pc.straight.h = p.at("h").get<double>();
            pc.straight.s_start = p.at("s_start").get<double>();
            pc.straight.s_end = p.at("s_end").get<double>();
            pc.straight.qh_len = p.at("len").get<double>();
        } else {
            throw InputError("path json: unknown piece type '" + type + "'");
        }
        g.pieces.push_back(pc);
    }
    for (const auto& e : j.at("events")) {
        ShootEvent ev;
        ev.t = e.at("t").get<double>();
        ev.kind = kind_from(e.at("kind").get<std::string>());
        ev.location.kind = loc_from(e.at("loc").get<std::string>());
        ev.location.cell = e.at("cell").get<int>();
        ev.location.edge = e.at("edge").get<int>();
        ev.location.corner = e.at("corner").get<int>();
        ev.cell_from = e.at("cell_from").get<int>();
        ev.cell_to = e.at("cell_to").get<int>();
        ev.flagged = e.at("flagged").get<bool>();
        g.events.push_back(ev);
    }
    return g;
}

ordered_json connect_to_json(const ConnectResult& r) {
    ordered_json j;
    j["distance"] = r.distance;
    j["unique"] = r.unique;
    j["paths"] = ordered_json::array();
    for (const auto& g : r.paths) j["paths"].push_back(path_to_json(g));
    return j;
}

ordered_json report_to_json(const VerificationReport& r) {
    ordered_json j;
    j["statement_id"] = r.statement_id;
    j["trials"] = r.trials;
    j["failures"] = r.failures;
    j["worst_margin"] = r.worst_margin;
    j["config_digest"] = r.config_digest;
    j["passed"] = r.passed();
    return j;
}

ordered_json polyline_to_json(const Polyline& p) {
    ordered_json j;
    j["closed"] = p.closed;
    j["points"] = ordered_json::array();
    for (const Vec2& v : p.vertices) j["points"].push_back(vec_json(v));
    return j;
}

Polyline polyline_from_json(const ordered_json& j) {
    Polyline p;
    p.closed = j.at("closed").get<bool>();
    for (const auto& e : j.at("points")) p.vertices.push_back(vec_from(e));
    return p;
}

std::string to_csv(const Polyline& p) {
    std::string s = "x,y\n";
    char buf[80];
    for (const Vec2& v : p.vertices) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", v.x, v.y);
        s += buf;
    }
    return s;
}

std::string ball_to_csv(const QhBall& b) {
    std::string s = "phi,x,y\n";
    char buf[120];
    for (const auto& smp : b.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", smp.phi, smp.endpoint.x,
                      smp.endpoint.y);
        s += buf;
    }
    return s;
}

}  // namespace qhgeo
