#include "qhgeo/geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <utility>

#include "qhgeo/errors.hpp"
#include "qhgeo/oracle.hpp"

namespace qhgeo {
namespace {

bool dbg() {
    static bool v = std::getenv("QHGEO_DBG") != nullptr;
    return v;
}

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxPieces = 10000;
// |sin| of the angle between tangent and edge below which a contact counts
// as tangential
constexpr double kTangential = 1e-9;
// root-skip (in path parameter) on edges the piece start touches, so the
// junction root is not re-detected; plain chatter floor elsewhere
constexpr double kNearSkip = 1e-5;
constexpr double kRootMin = 1e-11;
constexpr double kGrazeStep = 1e-6;   // resume offset after logging a graze
constexpr double kCornerProbe = 1e-6; // probe parameter for corner continuation

double edge_param(const VoronoiEdge& e, Vec2 p) { return dot(p - e.point, e.dir); }

double edge_window_dist(const VoronoiEdge& e, Vec2 p) {
    double u = std::clamp(edge_param(e, p), e.lo, e.hi);
    return dist(p, e.point + u * e.dir);
}

// Spiral through p with unit tangent tau about center S. alpha is the angle
// of the tangent from the outward radius, so tangent(0) == tau exactly up to
// rounding of the angle split.
SpiralArc make_arc(Vec2 S, Vec2 p, Vec2 tau, double len) {
    SpiralArc a;
    a.center = S;
    Vec2 rad = p - S;
    a.rho0 = norm(rad);
    a.theta0 = std::atan2(rad.y, rad.x);
    a.alpha = ang(tau, rad);
    a.qh_len = len;
    return a;
}

// ------------------------------------------------------------------
// shooting walker

struct Walker {
    const VoronoiDomain& d;
    GeodesicPath path;
    double scale, ctol;
    Vec2 p, tau;
    double rem = 0.0, consumed = 0.0;
    enum class Mode { spiral, slide, done };
    Mode mode = Mode::done;
    int cell = -1; // spiral mode
    int edge = -1; // slide mode
    int sgn = +1;  // slide travel sign along the edge dir

    Walker(const VoronoiDomain& dom, Vec2 x, Vec2 t, double r)
        : d(dom), scale(std::max(1.0, dom.extent())), ctol(1e-9 * scale), p(x), tau(t), rem(r) {
        path.start = x;
        path.total_qh_len = r;
    }

    void add_event(double t, EventKind k, const CellLocation& loc, int from, int to,
                   bool flagged) {
        ShootEvent ev;
        ev.t = t;
        ev.location = loc;
        ev.kind = k;
        ev.cell_from = from;
        ev.cell_to = to;
        ev.flagged = flagged;
        path.events.push_back(ev);
    }

    CellLocation edge_loc(int eid, int cell_hint) const {
        CellLocation l;
        l.kind = CellLocation::Kind::edge;
        l.cell = cell_hint >= 0 ? cell_hint : d.edges()[eid].cell_a;
        l.edge = eid;
        return l;
    }

    CellLocation corner_loc(int cid, int cell_hint) const {
        CellLocation l;
        l.kind = CellLocation::Kind::corner;
        l.cell = cell_hint >= 0 ? cell_hint : d.corners()[cid].cells.front();
        l.corner = cid;
        return l;
    }

    void push_spiral(const SpiralArc& a) {
        PathPiece pc;
        pc.kind = PathPiece::Kind::spiral;
        pc.spiral = a;
        pc.cell = cell;
        path.pieces.push_back(pc);
    }

    void push_straight(const StraightArc& a) {
        PathPiece pc;
        pc.kind = PathPiece::Kind::straight;
        pc.straight = a;
        pc.cell = -1;
        path.pieces.push_back(pc);
    }

    int corner_near(int eid, Vec2 q) const {
        for (size_t k = 0; k < d.corners().size(); ++k) {
            const VoronoiCorner& cr = d.corners()[k];
            if (dist(q, cr.position) > 2 * ctol) continue;
            if (std::find(cr.edges.begin(), cr.edges.end(), eid) != cr.edges.end())
                return (int)k;
        }
        return -1;
    }

    void start_at() {
        CellLocation loc = d.locate(p, ctol);
        if (loc.kind == CellLocation::Kind::corner) {
            p = d.corners()[loc.corner].position;
            corner_continue(loc.corner, loc.cell, false);
            return;
        }
        if (loc.kind == CellLocation::Kind::edge) {
            const VoronoiEdge& e = d.edges()[loc.edge];
            if (std::abs(cross(e.dir, tau)) <= kTangential) {
                edge = loc.edge;
                sgn = dot(tau, e.dir) >= 0 ? +1 : -1;
                mode = Mode::slide;
                add_event(consumed, EventKind::sliding_start, edge_loc(edge, e.cell_a),
                          e.cell_a, e.cell_b, false);
                return;
            }
            double side = cross(e.dir, tau);
            double side_a = cross(e.dir, d.nuclei()[e.cell_a] - e.point);
            cell = side * side_a > 0 ? e.cell_a : e.cell_b;
            mode = Mode::spiral;
            return;
        }
        cell = loc.cell;
        mode = Mode::spiral;
    }

    // Continuation through a corner with the tangent kept. A tangent running
    // along an incident edge with room ahead slides; otherwise each incident
    // cell's spiral is probed a step ahead and the one that stays inside its
    // cell wins (ties: smallest |alpha|, flagged; none: least violation,
    // flagged). The corner is always logged.
    void corner_continue(int corner_id, int from_cell, bool was_sliding) {
        const VoronoiCorner& cr = d.corners()[corner_id];
        for (int eid : cr.edges) {
            const VoronoiEdge& e = d.edges()[eid];
            if (std::abs(cross(e.dir, tau)) > kTangential) continue;
            int s = dot(tau, e.dir) >= 0 ? +1 : -1;
            double u = edge_param(e, p);
            double room = s > 0 ? e.hi - u : u - e.lo;
            if (room <= 2 * ctol) continue;
            add_event(consumed, EventKind::corner, corner_loc(corner_id, from_cell),
                      from_cell, -1, false);
            if (!was_sliding)
                add_event(consumed, EventKind::sliding_start, edge_loc(eid, e.cell_a),
                          e.cell_a, e.cell_b, false);
            edge = eid;
            sgn = s;
            mode = Mode::slide;
            return;
        }
        int best = -1, stay_count = 0;
        double best_alpha = kInf;
        for (int cid : cr.cells) {
            Vec2 S = d.nuclei()[cid];
            SpiralArc cand = make_arc(S, p, tau, kCornerProbe);
            Vec2 probe = cand.point(kCornerProbe);
            double viol = dist(probe, S) - d.delta(probe);
            if (viol > 1e-12 * std::max(cand.rho0, 1e-300)) continue;
            double aa = std::abs(cand.alpha);
            if (stay_count == 0 || aa < best_alpha) {
                best = cid;
                best_alpha = aa;
            }
            ++stay_count;
        }
        if (stay_count == 0) {
            // nothing stays inside its cell a probe step ahead: least
            // violation wins, flagged
            double best_viol = kInf;
            for (int cid : cr.cells) {
                SpiralArc cand = make_arc(d.nuclei()[cid], p, tau, kCornerProbe);
                Vec2 probe = cand.point(kCornerProbe);
                double viol = dist(probe, d.nuclei()[cid]) - d.delta(probe);
                if (viol < best_viol) {
                    best_viol = viol;
                    best = cid;
                }
            }
        }
        bool flagged = stay_count != 1;
        add_event(consumed, EventKind::corner, corner_loc(corner_id, from_cell), from_cell,
                  best, flagged);
        if (was_sliding)
            add_event(consumed, EventKind::sliding_end, corner_loc(corner_id, best), from_cell,
                      best, false);
        cell = best;
        mode = Mode::spiral;
    }

    void step_spiral() {
        const VoronoiCell& c = d.cells()[cell];
        Vec2 S = c.nucleus;
        if (!(norm(p - S) > 0.0))
            throw std::domain_error("shoot: path reached a boundary point");
        SpiralArc arc = make_arc(S, p, tau, rem);
        std::vector<double> tmin(c.edges.size());
        for (size_t i = 0; i < c.edges.size(); ++i) {
            const VoronoiEdge& e = d.edges()[c.edges[i]];
            tmin[i] = edge_window_dist(e, p) <= 10 * ctol ? kNearSkip : kRootMin;
        }
        double scan_from = 0.0;
        for (int graze_guard = 0; graze_guard < 1000; ++graze_guard) {
            double best_t = rem;
            int best_e = -1;
            for (size_t i = 0; i < c.edges.size(); ++i) {
                const VoronoiEdge& e = d.edges()[c.edges[i]];
                auto roots =
                    spiral_line_intersections(arc, e.point, e.dir, e.lo - ctol, e.hi + ctol,
                                              best_t, std::max(tmin[i], scan_from));
                if (!roots.empty() && roots.front() < best_t) {
                    best_t = roots.front();
                    best_e = c.edges[i];
                }
            }
            if (best_e < 0) {
                arc.qh_len = rem;
                push_spiral(arc);
                consumed += rem;
                rem = 0.0;
                mode = Mode::done;
                return;
            }
            Vec2 q = arc.point(best_t);
            Vec2 tq = arc.tangent(best_t);
            const VoronoiEdge& e = d.edges()[best_e];
            int cid = corner_near(best_e, q);
            if (cid >= 0) {
                arc.qh_len = best_t;
                push_spiral(arc);
                consumed += best_t;
                rem -= best_t;
                int from = cell;
                p = d.corners()[cid].position;
                tau = tq;
                corner_continue(cid, from, false);
                return;
            }
            if (std::abs(cross(e.dir, tq)) <= kTangential) {
                // tangential graze: the spiral bends back into its own cell,
                // so the contact is logged and the same arc continues
                add_event(consumed + best_t, EventKind::touching, edge_loc(best_e, cell),
                          cell, cell, false);
                scan_from = best_t + kGrazeStep;
                if (scan_from >= rem) {
                    arc.qh_len = rem;
                    push_spiral(arc);
                    consumed += rem;
                    rem = 0.0;
                    mode = Mode::done;
                    return;
                }
                continue;
            }
            arc.qh_len = best_t;
            push_spiral(arc);
            consumed += best_t;
            rem -= best_t;
            int to = e.cell_a == cell ? e.cell_b : e.cell_a;
            add_event(consumed, EventKind::crossing, edge_loc(best_e, cell), cell, to, false);
            p = q;
            tau = tq;
            cell = to;
            return;
        }
        throw ConvergenceError("shoot: graze budget exhausted", rem);
    }

    void step_slide() {
        const VoronoiEdge& e = d.edges()[edge];
        Vec2 dirv = double(sgn) * e.dir;
        double s0 = dot(p - e.point, dirv);
        double starget = sgn > 0 ? e.hi : -e.lo; // window end in travel coordinates
        double a0 = std::asinh(s0 / e.h);
        double len_end = std::isfinite(starget) ? std::asinh(starget / e.h) - a0 : kInf;
        if (!(len_end >= 0.0)) len_end = 0.0;
        StraightArc arc;
        arc.edge = edge;
        arc.foot = e.point;
        arc.dir = dirv;
        arc.h = e.h;
        arc.s_start = s0;
        if (rem <= len_end) {
            arc.s_end = e.h * std::sinh(a0 + rem);
            arc.qh_len = rem;
            push_straight(arc);
            consumed += rem;
            rem = 0.0;
            mode = Mode::done;
            return;
        }
        if (len_end > 0.0) {
            arc.s_end = starget;
            arc.qh_len = len_end;
            push_straight(arc);
            consumed += len_end;
            rem -= len_end;
        }
        Vec2 q = e.point + (sgn > 0 ? e.hi : e.lo) * e.dir;
        p = q;
        tau = dirv;
        int cid = corner_near(edge, q);
        if (cid < 0) {
            // window end without a catalogued corner; fall back to probing
            // the two flanking cells, flagged
            add_event(consumed, EventKind::sliding_end, edge_loc(edge, e.cell_a), e.cell_a,
                      e.cell_b, true);
            double sa = dist(make_arc(d.nuclei()[e.cell_a], p, tau, kCornerProbe).point(
                                 kCornerProbe),
                             d.nuclei()[e.cell_a]);
            double sb = dist(make_arc(d.nuclei()[e.cell_b], p, tau, kCornerProbe).point(
                                 kCornerProbe),
                             d.nuclei()[e.cell_b]);
            cell = sa <= sb ? e.cell_a : e.cell_b;
            mode = Mode::spiral;
            return;
        }
        corner_continue(cid, -1, true);
    }

    GeodesicPath run() {
        if (rem > 0.0) start_at();
        while (rem > 0.0 && mode != Mode::done) {
            if ((int)path.pieces.size() >= kMaxPieces)
                throw ConvergenceError("shoot: piece budget exhausted", rem);
            if (mode == Mode::spiral)
                step_spiral();
            else
                step_slide();
        }
        return std::move(path);
    }
};

} // namespace

GeodesicPath shoot(const VoronoiDomain& d, Vec2 x, Vec2 direction, double r) {
    if (!std::isfinite(x.x) || !std::isfinite(x.y))
        throw InputError("shoot: start must be finite");
    if (!std::isfinite(r) || r < 0.0)
        throw InputError("shoot: length must be finite and nonnegative");
    double n = norm(direction);
    if (!(n > 0.0) || !std::isfinite(n))
        throw InputError("shoot: direction must be nonzero");
    if (!(d.delta(x) > 0.0))
        throw std::domain_error("shoot: start lies on the boundary");
    Walker w(d, x, (1.0 / n) * direction, r);
    return w.run();
}

Vec2 exp_map(const VoronoiDomain& d, Vec2 x, double phi, double r) {
    return shoot(d, x, unit_vec(phi), r).end();
}

Vec2 GeodesicPath::point(double t) const {
    if (pieces.empty() || t <= 0.0) return pieces.empty() ? start : pieces.front().start();
    double acc = 0.0;
    for (size_t i = 0; i < pieces.size(); ++i) {
        double l = pieces[i].len();
        if (t <= acc + l || i + 1 == pieces.size())
            return pieces[i].point(std::clamp(t - acc, 0.0, l));
        acc += l;
    }
    return pieces.back().end();
}

Vec2 GeodesicPath::tangent(double t) const {
    if (pieces.empty()) return {1.0, 0.0};
    if (t <= 0.0) return pieces.front().tangent(0.0);
    double acc = 0.0;
    for (size_t i = 0; i < pieces.size(); ++i) {
        double l = pieces[i].len();
        if (t <= acc + l || i + 1 == pieces.size())
            return pieces[i].tangent(std::clamp(t - acc, 0.0, l));
        acc += l;
    }
    return pieces.back().tangent(pieces.back().len());
}

GeodesicPath reverse_path(const GeodesicPath& p) {
    GeodesicPath r;
    r.start = p.end();
    r.total_qh_len = p.total_qh_len;
    for (auto it = p.pieces.rbegin(); it != p.pieces.rend(); ++it) {
        PathPiece q = *it;
        if (it->kind == PathPiece::Kind::spiral) {
            const SpiralArc& a = it->spiral;
            SpiralArc b;
            b.center = a.center;
            b.rho0 = a.rho(a.qh_len);
            b.theta0 = a.theta0 + a.qh_len * std::sin(a.alpha);
            b.alpha = pr(a.alpha + kPi);
            b.qh_len = a.qh_len;
            q.spiral = b;
        } else {
            StraightArc b = it->straight;
            b.dir = -1.0 * it->straight.dir;
            b.s_start = -it->straight.s_end;
            b.s_end = -it->straight.s_start;
            q.straight = b;
        }
        r.pieces.push_back(q);
    }
    for (auto it = p.events.rbegin(); it != p.events.rend(); ++it) {
        ShootEvent ev = *it;
        ev.t = p.total_qh_len - ev.t;
        std::swap(ev.cell_from, ev.cell_to);
        if (ev.kind == EventKind::sliding_start)
            ev.kind = EventKind::sliding_end;
        else if (ev.kind == EventKind::sliding_end)
            ev.kind = EventKind::sliding_start;
        r.events.push_back(ev);
    }
    return r;
}

GeodesicPath prolong(const VoronoiDomain& d, const GeodesicPath& p, double extra) {
    if (!std::isfinite(extra) || extra < 0.0)
        throw InputError("prolong: extension must be finite and nonnegative");
    if (extra == 0.0) return p;
    if (p.pieces.empty())
        throw InputError("prolong: zero-length path has no direction");
    GeodesicPath tail = shoot(d, p.end(), p.tangent(p.total_qh_len), extra);
    GeodesicPath out = p;
    out.total_qh_len = p.total_qh_len + extra;
    for (const auto& pc : tail.pieces) out.pieces.push_back(pc);
    for (ShootEvent ev : tail.events) {
        ev.t += p.total_qh_len;
        out.events.push_back(ev);
    }
    return out;
}

// ------------------------------------------------------------------
// two-point solver

namespace {

GeodesicPath truncate_path(const GeodesicPath& g, double t_cut) {
    GeodesicPath out;
    out.start = g.start;
    out.total_qh_len = std::clamp(t_cut, 0.0, g.total_qh_len);
    double left = out.total_qh_len;
    for (PathPiece pc : g.pieces) {
        double l = pc.len();
        if (left < l) {
            if (left > 0.0) {
                if (pc.kind == PathPiece::Kind::spiral) {
                    pc.spiral.qh_len = left;
                } else {
                    pc.straight.qh_len = left;
                    pc.straight.s_end = pc.straight.h *
                        std::sinh(std::asinh(pc.straight.s_start / pc.straight.h) + left);
                }
                out.pieces.push_back(pc);
            }
            break;
        }
        out.pieces.push_back(pc);
        left -= l;
    }
    // events at exactly the cut belong to whatever continues the path there
    for (const auto& ev : g.events)
        if (ev.t < out.total_qh_len) out.events.push_back(ev);
    return out;
}

// closest approach of the path to a point, by coarse scan plus golden section
double path_closest(const GeodesicPath& g, Vec2 y, double* t_best) {
    double T = g.total_qh_len;
    if (g.pieces.empty() || T <= 0.0) {
        if (t_best) *t_best = 0.0;
        return dist(g.start, y);
    }
    int n = std::max<int>(64, (int)g.pieces.size() * 8);
    double bt = 0.0, bd = kInf;
    for (int i = 0; i <= n; ++i) {
        double t = T * i / n;
        double dd = dist(g.point(t), y);
        if (dd < bd) {
            bd = dd;
            bt = t;
        }
    }
    double a = std::max(0.0, bt - T / n), b = std::min(T, bt + T / n);
    const double gr = 0.3819660112501051;
    double m1 = a + gr * (b - a), m2 = b - gr * (b - a);
    double f1 = dist(g.point(m1), y), f2 = dist(g.point(m2), y);
    for (int it = 0; it < 50; ++it) {
        if (f1 < f2) {
            b = m2;
            m2 = m1;
            f2 = f1;
            m1 = a + gr * (b - a);
            f1 = dist(g.point(m1), y);
        } else {
            a = m1;
            m1 = m2;
            f1 = f2;
            m2 = b - gr * (b - a);
            f2 = dist(g.point(m2), y);
        }
    }
    double t = 0.5 * (a + b), dd = dist(g.point(t), y);
    if (dd < bd) {
        bd = dd;
        bt = t;
    }
    if (t_best) *t_best = bt;
    return bd;
}

// parameter where the path touches the carrier line: golden section on the
// unsigned offset, then a secant polish on tangent alignment, which vanishes
// exactly at the offset extremum
double tangency_param(const GeodesicPath& g, Vec2 lp, Vec2 ld, double t_lo, double t_hi) {
    auto off = [&](double t) { return std::abs(cross(ld, g.point(t) - lp)); };
    int n = 256;
    double bt = t_lo, bo = kInf;
    for (int i = 0; i <= n; ++i) {
        double t = t_lo + (t_hi - t_lo) * i / n;
        double o = off(t);
        if (o < bo) {
            bo = o;
            bt = t;
        }
    }
    double step = (t_hi - t_lo) / n;
    double a = std::max(t_lo, bt - step), b = std::min(t_hi, bt + step);
    const double gr = 0.3819660112501051;
    double m1 = a + gr * (b - a), m2 = b - gr * (b - a);
    double f1 = off(m1), f2 = off(m2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            b = m2;
            m2 = m1;
            f2 = f1;
            m1 = a + gr * (b - a);
            f1 = off(m1);
        } else {
            a = m1;
            m1 = m2;
            f1 = f2;
            m2 = b - gr * (b - a);
            f2 = off(m2);
        }
    }
    double t = 0.5 * (a + b);
    auto mis = [&](double u) { return cross(ld, g.tangent(u)); };
    double t0 = t, t1 = t + 1e-7 * std::max(1.0, t);
    double g0 = mis(t0), g1 = mis(t1);
    for (int it = 0; it < 25 && std::abs(g1) > 1e-15; ++it) {
        if (g1 == g0) break;
        double t2 = t1 - g1 * (t1 - t0) / (g1 - g0);
        if (!std::isfinite(t2) || t2 < t_lo || t2 > t_hi) break;
        t0 = t1;
        g0 = g1;
        t1 = t2;
        g1 = mis(t1);
    }
    return std::abs(mis(t1)) < std::abs(mis(t)) ? t1 : t;
}

struct FanProbe {
    double phi = 0.0;
    bool ok = false;
    GeodesicPath path;
    Vec2 end;
};

struct TangentChain {
    GeodesicPath path; // truncated at the tangency; empty for an on-edge start
    int edge = -1;
    double u = 0.0; // contact offset along the stored edge's dir
    int sgn = 0;    // travel sign along the stored edge's dir at contact
    Vec2 q;         // contact point on the carrier
};

struct CornerChain {
    GeodesicPath path;
    int corner = -1;
    Vec2 tau_in;
};

struct SideScan {
    std::vector<FanProbe> probes;
    std::vector<TangentChain> tchains;
    std::vector<CornerChain> cchains;
    // bisected bracket endpoints: the last probe of each family at a fan fold.
    // Solutions hiding in basins thinner than the probe spacing sit right next
    // to these, so they are the sharpest refinement seeds available.
    std::vector<FanProbe> folds;
};

void try_tangent_chain(const VoronoiDomain& d, const GeodesicPath& g, int eid, double t_hint,
                       double S, std::vector<TangentChain>& out) {
    if (eid < 0) return;
    const VoronoiEdge& e = d.edges()[eid];
    double t_lo = std::max(0.0, t_hint - 0.75);
    double t_hi = std::min(g.total_qh_len, t_hint + 0.75);
    if (!(t_hi > t_lo)) return;
    double t = tangency_param(g, e.point, e.dir, t_lo, t_hi);
    Vec2 pt = g.point(t);
    if (std::abs(cross(e.dir, pt - e.point)) > 1e-9 * S) {
        if (dbg())
            std::fprintf(stderr, "  [ttc] edge=%d reject offset=%.3e\n", eid,
                         std::abs(cross(e.dir, pt - e.point)));
        return;
    }
    Vec2 tg = g.tangent(t);
    if (std::abs(cross(e.dir, tg)) > 1e-6) {
        if (dbg())
            std::fprintf(stderr, "  [ttc] edge=%d reject tangent=%.3e\n", eid,
                         std::abs(cross(e.dir, tg)));
        return;
    }
    double u = dot(pt - e.point, e.dir);
    if (u < e.lo - 1e-9 * S || u > e.hi + 1e-9 * S) {
        if (dbg())
            std::fprintf(stderr, "  [ttc] edge=%d reject u=%.6f window=[%.6f,%.6f]\n", eid, u,
                         e.lo, e.hi);
        return;
    }
    if (dbg())
        std::fprintf(stderr, "  [ttc] edge=%d ACCEPT u=%.6f q=(%.6f,%.6f) sgn=%d t=%.6f\n", eid,
                     u, pt.x, pt.y, dot(tg, e.dir) >= 0.0 ? +1 : -1, t);
    TangentChain tc;
    tc.path = truncate_path(g, t);
    tc.edge = eid;
    tc.u = u;
    tc.sgn = dot(tg, e.dir) >= 0.0 ? +1 : -1;
    tc.q = e.point + u * e.dir;
    out.push_back(std::move(tc));
}

void try_corner_chain(const VoronoiDomain& d, const GeodesicPath& g, int cid, double t_hint,
                      double S, std::vector<CornerChain>& out) {
    if (cid < 0) return;
    Vec2 cpos = d.corners()[cid].position;
    if (dist(g.point(t_hint), cpos) > 1e-6 * S) return;
    CornerChain cc;
    cc.path = truncate_path(g, t_hint);
    cc.corner = cid;
    cc.tau_in = g.tangent(t_hint);
    out.push_back(std::move(cc));
}

// first structural difference of two event logs marks the feature the fan
// jumps over: an edge one side crosses and the other grazes past, or a
// corner hit
void extract_chains(const VoronoiDomain& d, const FanProbe& a, const FanProbe& b, double S,
                    std::vector<TangentChain>& tch, std::vector<CornerChain>& cch) {
    size_t n = std::min(a.path.events.size(), b.path.events.size());
    size_t k = 0;
    while (k < n) {
        const ShootEvent& ea = a.path.events[k];
        const ShootEvent& eb = b.path.events[k];
        if (ea.kind != eb.kind || ea.location.edge != eb.location.edge ||
            ea.location.corner != eb.location.corner)
            break;
        ++k;
    }
    auto consider = [&](const FanProbe& hit, const FanProbe& miss) {
        if (k >= hit.path.events.size()) return;
        const ShootEvent& ev = hit.path.events[k];
        if (dbg())
            std::fprintf(stderr,
                         " [xch] phi=(%.9f,%.9f) k=%zu kind=%d edge=%d corner=%d t=%.6f\n",
                         hit.phi, miss.phi, k, (int)ev.kind, ev.location.edge,
                         ev.location.corner, ev.t);
        if (ev.kind == EventKind::crossing)
            try_tangent_chain(d, miss.path, ev.location.edge, ev.t, S, tch);
        else if (ev.kind == EventKind::corner)
            try_corner_chain(d, hit.path, ev.location.corner, ev.t, S, cch);
        else if (ev.kind == EventKind::sliding_start) {
            // the hit side itself entered a slide: its prefix is a chain
            TangentChain tc;
            tc.path = truncate_path(hit.path, ev.t);
            tc.edge = ev.location.edge;
            const VoronoiEdge& e = d.edges()[tc.edge];
            Vec2 pt = tc.path.end();
            tc.u = dot(pt - e.point, e.dir);
            tc.q = e.point + tc.u * e.dir;
            Vec2 tg = hit.path.tangent(ev.t);
            tc.sgn = dot(tg, e.dir) >= 0.0 ? +1 : -1;
            if (std::abs(cross(e.dir, pt - e.point)) <= 1e-9 * S) tch.push_back(std::move(tc));
        }
    };
    consider(a, b);
    consider(b, a);
}

SideScan scan_side(const VoronoiDomain& d, Vec2 from, double r_cap, int K, double S) {
    SideScan sc;
    sc.probes.resize(K);
    for (int k = 0; k < K; ++k) {
        double phi = -kPi + 2.0 * kPi * k / K;
        sc.probes[k].phi = phi;
        try {
            sc.probes[k].path = shoot(d, from, unit_vec(phi), r_cap);
            sc.probes[k].end = sc.probes[k].path.end();
            sc.probes[k].ok = true;
        } catch (...) {
        }
    }
    // gap between adjacent fan endpoints, measured so that the exponential
    // spread of the fan does not drown genuine jumps: log(1 + |e_i - e_j| / min delta)
    // is comparable across sectors because smooth sectors grow like the metric itself
    auto qgap = [&](const FanProbe& a, const FanProbe& b) {
        double dl = std::min(d.delta(a.end), d.delta(b.end));
        return std::log1p(dist(a.end, b.end) / std::max(dl, 1e-300));
    };
    std::vector<std::pair<double, int>> brackets;
    for (int k = 0; k < K; ++k) {
        int j = (k + 1) % K;
        if (!sc.probes[k].ok || !sc.probes[j].ok) continue;
        double gp = qgap(sc.probes[k], sc.probes[j]);
        if (gp > 0.02) brackets.push_back({gp, k});
    }
    std::sort(brackets.rbegin(), brackets.rend());
    if (dbg())
        std::fprintf(stderr, "[scan] from=(%.6f,%.6f) r=%.4f K=%d brackets=%zu\n", from.x,
                     from.y, r_cap, K, brackets.size());
    size_t cap = std::max<size_t>(16, K / 16);
    if (brackets.size() > cap) brackets.resize(cap);
    for (auto& [gp, k] : brackets) {
        if (dbg())
            std::fprintf(stderr, " [brk] phi=%.9f gap=%.4f\n", sc.probes[k].phi, gp);
        int j = (k + 1) % K;
        FanProbe A = sc.probes[k];
        FanProbe B = sc.probes[j];
        double pa = A.phi, pb = A.phi + 2.0 * kPi / K;
        bool dead = false;
        for (int it = 0; it < 60; ++it) {
            if (dist(A.end, B.end) <= 1e-6 * S) break; // closing smoothly, give up early
            double pm = 0.5 * (pa + pb);
            GeodesicPath gm;
            try {
                gm = shoot(d, from, unit_vec(pm), r_cap);
            } catch (...) {
                dead = true;
                break;
            }
            Vec2 em = gm.end();
            if (dist(em, A.end) <= dist(em, B.end)) {
                pa = pm;
                A.phi = pm;
                A.path = std::move(gm);
                A.end = em;
            } else {
                pb = pm;
                B.phi = pm;
                B.path = std::move(gm);
                B.end = em;
            }
        }
        if (dead) {
            if (dbg()) std::fprintf(stderr, " [brk]  -> dead\n");
            continue;
        }
        if (dist(A.end, B.end) <= 1e-6 * S) {
            if (dbg()) std::fprintf(stderr, " [brk]  -> smooth\n");
            continue; // resolved smoothly
        }
        extract_chains(d, A, B, S, sc.tchains, sc.cchains);
        sc.folds.push_back(A);
        sc.folds.push_back(B);
    }
    return sc;
}

struct SlideRun {
    std::vector<PathPiece> pieces;
    std::vector<ShootEvent> events; // pass-through corners, t relative to run start
    double len = 0.0;
    bool ok = false;
};

// straight run along a carrier from pstart (on edge eid) to qtarget on the
// same carrier, hopping pass-through corners onto collinear edges
SlideRun build_slide(const VoronoiDomain& d, int eid, Vec2 pstart, Vec2 qtarget, double S) {
    SlideRun run;
    if (dist(pstart, qtarget) <= 1e-12 * S) {
        run.ok = true;
        return run;
    }
    Vec2 dv = normalized(qtarget - pstart);
    int cur = eid;
    Vec2 p = pstart;
    for (int hop = 0; hop < 256; ++hop) {
        const VoronoiEdge& e = d.edges()[cur];
        if (std::abs(cross(dv, e.dir)) > 1e-9) return run;
        int s = dot(dv, e.dir) >= 0.0 ? +1 : -1;
        double ucur = dot(p - e.point, e.dir);
        double utgt = dot(qtarget - e.point, e.dir);
        double uend = s > 0 ? e.hi : e.lo;
        bool within = s > 0 ? utgt <= uend + 1e-9 * S : utgt >= uend - 1e-9 * S;
        double ustop = within ? utgt : uend;
        StraightArc arc;
        arc.edge = cur;
        arc.foot = e.point;
        arc.dir = double(s) * e.dir;
        arc.h = e.h;
        arc.s_start = s * ucur;
        arc.s_end = s * ustop;
        arc.qh_len = std::asinh(arc.s_end / e.h) - std::asinh(arc.s_start / e.h);
        if (!(arc.qh_len >= 0.0)) arc.qh_len = 0.0;
        if (arc.qh_len > 0.0) {
            PathPiece pc;
            pc.kind = PathPiece::Kind::straight;
            pc.straight = arc;
            pc.cell = -1;
            run.pieces.push_back(pc);
            run.len += arc.qh_len;
        }
        p = e.point + ustop * e.dir;
        if (within) {
            run.ok = true;
            return run;
        }
        int cid = -1;
        for (size_t c = 0; c < d.corners().size(); ++c)
            if (dist(d.corners()[c].position, p) <= 2e-9 * S) {
                cid = (int)c;
                break;
            }
        if (cid < 0) return run;
        ShootEvent ev;
        ev.t = run.len;
        ev.kind = EventKind::corner;
        ev.location.kind = CellLocation::Kind::corner;
        ev.location.cell = e.cell_a;
        ev.location.corner = cid;
        run.events.push_back(ev);
        int nxt = -1;
        for (int e2 : d.corners()[cid].edges) {
            if (e2 == cur) continue;
            const VoronoiEdge& f = d.edges()[e2];
            if (std::abs(cross(dv, f.dir)) > 1e-9) continue;
            int s2 = dot(dv, f.dir) >= 0.0 ? +1 : -1;
            double u2 = dot(p - f.point, f.dir);
            double room = s2 > 0 ? f.hi - u2 : u2 - f.lo;
            if (room > 1e-9 * S) {
                nxt = e2;
                break;
            }
        }
        if (nxt < 0) return run;
        cur = nxt;
    }
    return run;
}

bool same_carrier(const VoronoiDomain& d, int ea, int eb, double S) {
    const VoronoiEdge& a = d.edges()[ea];
    const VoronoiEdge& b = d.edges()[eb];
    if (std::abs(cross(a.dir, b.dir)) > 1e-9) return false;
    return std::abs(cross(a.dir, b.point - a.point)) <= 1e-9 * S;
}

std::optional<GeodesicPath> compose_slide(const VoronoiDomain& d, const TangentChain& xc,
                                          const TangentChain& yc, double S) {
    if (!same_carrier(d, xc.edge, yc.edge, S)) return std::nullopt;
    auto rej = [&](const char* why, double v) -> std::optional<GeodesicPath> {
        if (dbg())
            std::fprintf(stderr, " [cmp] ex=%d ey=%d ux=%.6f uy=%.6f reject %s (%.3e)\n",
                         xc.edge, yc.edge, xc.u, yc.u, why, v);
        return std::nullopt;
    };
    double sep = dist(xc.q, yc.q);
    Vec2 dv = sep > 1e-12 * S ? normalized(yc.q - xc.q) : Vec2{0.0, 0.0};
    Vec2 tx{0, 0}, ty{0, 0};
    if (xc.path.total_qh_len > 0.0) {
        tx = xc.path.tangent(xc.path.total_qh_len);
        if (dist(xc.path.end(), xc.q) > 1e-9 * S)
            return rej("x-end", dist(xc.path.end(), xc.q));
        if (sep > 1e-12 * S && dot(tx, dv) < 0.5) return rej("x-dot", dot(tx, dv));
    }
    if (yc.path.total_qh_len > 0.0) {
        ty = yc.path.tangent(yc.path.total_qh_len);
        if (dist(yc.path.end(), yc.q) > 1e-9 * S)
            return rej("y-end", dist(yc.path.end(), yc.q));
        if (sep > 1e-12 * S && dot(ty, dv) > -0.5) return rej("y-dot", dot(ty, dv));
    }
    if (sep <= 1e-12 * S) {
        // tangency chains meeting head on: no straight piece
        if (xc.path.pieces.empty() || yc.path.pieces.empty())
            return rej("headon-empty", 0.0);
        if (norm(tx + ty) > 1e-6) return rej("headon-tangent", norm(tx + ty));
    }
    SlideRun run = build_slide(d, xc.edge, xc.q, yc.q, S);
    if (!run.ok) return rej("slide-run", run.len);
    if (dbg())
        std::fprintf(stderr, " [cmp] ex=%d ey=%d ux=%.6f uy=%.6f ACCEPT len=%.9f\n", xc.edge,
                     yc.edge, xc.u, yc.u,
                     xc.path.total_qh_len + run.len + yc.path.total_qh_len);
    GeodesicPath g;
    g.start = xc.path.start;
    g.pieces = xc.path.pieces;
    g.events = xc.path.events;
    double off = xc.path.total_qh_len;
    if (run.len > 0.0) {
        const VoronoiEdge& ex = d.edges()[xc.edge];
        ShootEvent ev;
        ev.t = off;
        ev.kind = EventKind::sliding_start;
        ev.location.kind = CellLocation::Kind::edge;
        ev.location.cell = ex.cell_a;
        ev.location.edge = xc.edge;
        ev.cell_from = ex.cell_a;
        ev.cell_to = ex.cell_b;
        g.events.push_back(ev);
        for (const auto& pc : run.pieces) g.pieces.push_back(pc);
        for (ShootEvent e2 : run.events) {
            e2.t += off;
            g.events.push_back(e2);
        }
        const VoronoiEdge& ey = d.edges()[yc.edge];
        ShootEvent ev2;
        ev2.t = off + run.len;
        ev2.kind = EventKind::sliding_end;
        ev2.location.kind = CellLocation::Kind::edge;
        ev2.location.cell = ey.cell_a;
        ev2.location.edge = yc.edge;
        ev2.cell_from = ey.cell_a;
        ev2.cell_to = ey.cell_b;
        g.events.push_back(ev2);
    }
    GeodesicPath ry = reverse_path(yc.path);
    double off2 = off + run.len;
    for (const auto& pc : ry.pieces) g.pieces.push_back(pc);
    for (ShootEvent e2 : ry.events) {
        e2.t += off2;
        g.events.push_back(e2);
    }
    g.total_qh_len = off2 + yc.path.total_qh_len;
    return g;
}

std::optional<GeodesicPath> compose_corner(const CornerChain& xc, const CornerChain& yc,
                                           int corner_id) {
    if (xc.corner != yc.corner || xc.corner != corner_id) return std::nullopt;
    if (xc.path.pieces.empty() || yc.path.pieces.empty()) return std::nullopt;
    if (norm(xc.tau_in + yc.tau_in) > 1e-6) return std::nullopt;
    GeodesicPath g = xc.path;
    ShootEvent ev;
    ev.t = xc.path.total_qh_len;
    ev.kind = EventKind::corner;
    ev.location.kind = CellLocation::Kind::corner;
    ev.location.corner = corner_id;
    ev.location.cell = 0;
    g.events.push_back(ev);
    GeodesicPath ry = reverse_path(yc.path);
    for (const auto& pc : ry.pieces) g.pieces.push_back(pc);
    for (ShootEvent e2 : ry.events) {
        e2.t += xc.path.total_qh_len;
        g.events.push_back(e2);
    }
    g.total_qh_len = xc.path.total_qh_len + yc.path.total_qh_len;
    return g;
}

struct SolveOut {
    bool ok = false;
    double phi = 0.0, r = 0.0;
    double resid = kInf;
};

// damped Broyden iteration on (angle, length) against the endpoint defect
SolveOut refine_shot(const VoronoiDomain& d, Vec2 x, Vec2 y, double phi0, double r0,
                     double tol, double r_hi, int max_iter) {
    SolveOut out;
    auto G = [&](double phi, double r, Vec2& gv) -> bool {
        try {
            gv = exp_map(d, x, phi, r) - y;
            return true;
        } catch (...) {
            return false;
        }
    };
    double phi = phi0, r = std::clamp(r0, 1e-12, r_hi);
    Vec2 F;
    if (!G(phi, r, F)) return out;
    double resid = norm(F);
    out.phi = phi;
    out.r = r;
    out.resid = resid;
    if (resid <= tol) {
        out.ok = true;
        return out;
    }
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
    auto refresh = [&]() -> bool {
        double hphi = 1e-6, hr = 1e-6 * std::max(1.0, r);
        Vec2 Fa, Fb;
        if (!G(phi + hphi, r, Fa) || !G(phi, std::min(r + hr, r_hi * 2), Fb)) return false;
        a11 = (Fa.x - F.x) / hphi;
        a21 = (Fa.y - F.y) / hphi;
        a12 = (Fb.x - F.x) / hr;
        a22 = (Fb.y - F.y) / hr;
        return true;
    };
    if (!refresh()) return out;
    bool refreshed_once = false;
    for (int it = 0; it < max_iter; ++it) {
        double det = a11 * a22 - a12 * a21;
        if (!(std::abs(det) > 1e-300)) break;
        double dphi = (-F.x * a22 + F.y * a12) / det;
        double dr = (-a11 * F.y + a21 * F.x) / det;
        if (std::abs(dphi) > 0.7) {
            double sc = 0.7 / std::abs(dphi);
            dphi *= sc;
            dr *= sc;
        }
        double drmax = std::max(1.0, 0.25 * r_hi);
        if (std::abs(dr) > drmax) {
            double sc = drmax / std::abs(dr);
            dphi *= sc;
            dr *= sc;
        }
        bool accepted = false;
        double pn = phi, rn = r, resn = resid;
        Vec2 Fn;
        double lam = 1.0;
        for (int k = 0; k < 5; ++k, lam *= 0.4) {
            double pt = phi + lam * dphi;
            double rt = std::clamp(r + lam * dr, 1e-12, r_hi);
            Vec2 Ft;
            if (!G(pt, rt, Ft)) continue;
            double rest = norm(Ft);
            if (rest < resid * (1.0 - 1e-4) || rest <= tol) {
                pn = pt;
                rn = rt;
                Fn = Ft;
                resn = rest;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (refreshed_once) break;
            refreshed_once = true;
            if (!refresh()) break;
            continue;
        }
        double s1 = pn - phi, s2 = rn - r;
        double ss = s1 * s1 + s2 * s2;
        if (ss > 0.0) {
            double u1 = (Fn.x - F.x) - (a11 * s1 + a12 * s2);
            double u2 = (Fn.y - F.y) - (a21 * s1 + a22 * s2);
            a11 += u1 * s1 / ss;
            a12 += u1 * s2 / ss;
            a21 += u2 * s1 / ss;
            a22 += u2 * s2 / ss;
        }
        phi = pn;
        r = rn;
        F = Fn;
        resid = resn;
        if (resid < out.resid) {
            out.phi = phi;
            out.r = r;
            out.resid = resid;
        }
        if (resid <= tol) {
            out.ok = true;
            return out;
        }
    }
    return out;
}

bool same_path(const GeodesicPath& a, const GeodesicPath& b, double pos_tol) {
    double la = a.total_qh_len, lb = b.total_qh_len;
    if (std::abs(la - lb) > std::max(1e-7, 1e-6 * std::max(la, lb))) return false;
    for (int i = 0; i <= 8; ++i) {
        double f = i / 8.0;
        if (dist(a.point(f * la), b.point(f * lb)) > pos_tol) return false;
    }
    return true;
}

GeodesicPath arc_as_path(const SpiralArc& a, int cell) {
    GeodesicPath g;
    g.start = a.start();
    g.total_qh_len = a.qh_len;
    PathPiece pc;
    pc.kind = PathPiece::Kind::spiral;
    pc.spiral = a;
    pc.cell = cell;
    g.pieces.push_back(pc);
    return g;
}

} // namespace

ConnectResult connect(const VoronoiDomain& d, Vec2 x, Vec2 y, const ConnectOptions& opts) {
    if (!std::isfinite(x.x) || !std::isfinite(x.y) || !std::isfinite(y.x) ||
        !std::isfinite(y.y))
        throw InputError("connect: endpoints must be finite");
    double dx = d.delta(x), dy = d.delta(y);
    if (!(dx > 0.0) || !(dy > 0.0))
        throw std::domain_error("connect: endpoint lies on the boundary");

    ConnectResult res;
    double S = std::max(1.0, d.extent());
    if (dist(x, y) <= 1e-15 * std::max({1.0, norm(x), norm(y)})) {
        GeodesicPath g;
        g.start = x;
        res.paths = {g};
        res.distance = 0.0;
        res.unique = true;
        return res;
    }

    // single puncture: closed form
    if (d.nuclei().size() == 1 && opts.closed_forms) {
        auto pg = punctured_geodesic(d.nuclei()[0], x, y);
        for (const auto& a : pg.arcs) res.paths.push_back(arc_as_path(a, 0));
        res.distance = punctured_distance(d.nuclei()[0], x, y);
        res.unique = pg.unique;
        return res;
    }

    double tol = 1e-8 * dy;
    std::vector<GeodesicPath> cands;
    double best_resid = kInf;

    auto accept = [&](GeodesicPath&& g) {
        double resid = dist(g.end(), y);
        best_resid = std::min(best_resid, resid);
        if (resid <= std::max(tol, 1e-9 * S)) cands.push_back(std::move(g));
    };

    // replay a trial arc through the walker: if the arc truly stays inside
    // its cell the walker reproduces it, otherwise the endpoint moves and
    // the candidate dies on the residual check
    auto shoot_check = [&](Vec2 dir0, double L) {
        if (!(L > 0.0) || !std::isfinite(L)) return;
        try {
            accept(shoot(d, x, dir0, L));
        } catch (...) {
        }
    };

    CellLocation lx = d.locate(x), ly = d.locate(y);
    {
        std::vector<int> seed_cells = {lx.cell};
        if (ly.cell != lx.cell) seed_cells.push_back(ly.cell);
        for (int cid : seed_cells) {
            auto pg = punctured_geodesic(d.nuclei()[cid], x, y);
            for (const auto& a : pg.arcs) shoot_check(a.tangent(0.0), a.qh_len);
        }
    }

    // nearby pair inside one cell: the in-cell arc is the geodesic
    if (dist(x, y) <= 1e-4 * dx && !cands.empty()) {
        res.paths = {cands.front()};
        res.distance = cands.front().total_qh_len;
        res.unique = true;
        return res;
    }

    double comp = competitor_upper_bound(d, x, y);
    if (!std::isfinite(comp))
        comp = 4.0 * std::log1p(dist(x, y) / std::min(dx, dy)) + 4.0;
    double r_cap = opts.length_cap > 0.0 ? opts.length_cap
                                         : comp + std::max(1.0, 0.5 * comp);
    int K = std::max(opts.angles, 8);

    SideScan sx = scan_side(d, x, r_cap, K, S);

    // multi-start refinement, seeded at each probe's closest approach to y
    std::vector<std::pair<double, int>> order;
    for (int k = 0; k < K; ++k) {
        if (!sx.probes[k].ok) continue;
        double dd = path_closest(sx.probes[k].path, y, nullptr);
        order.push_back({dd, k});
    }
    std::sort(order.begin(), order.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // probes are refined in order of closest approach; tied minimizers live
    // in the best basins, so once a solution exists the tail adds nothing
    int refined = 0;
    size_t found_before = cands.size();
    for (auto& [dd, k] : order) {
        if (refined >= 24 && cands.size() > found_before) break;
        ++refined;
        double tb = 0.0;
        path_closest(sx.probes[k].path, y, &tb);
        SolveOut so = refine_shot(d, x, y, sx.probes[k].phi, tb, tol, 1.5 * r_cap,
                                  opts.max_iter);
        best_resid = std::min(best_resid, so.resid);
        if (so.ok) {
            try {
                accept(shoot(d, x, unit_vec(so.phi), so.r));
            } catch (...) {
            }
        }
    }
    // tangency and corner composites: chains from both endpoints joined on a
    // shared carrier or corner. Slides are limits of no shot family, so the
    // multi-start above cannot produce them. A second sweep at a shorter radius
    // sharpens bracket detection: at the full cap the fan has spread so far
    // that jumps shrink relative to the smooth growth.
    double r_low = std::min(r_cap, 2.0 + 0.25 * comp);
    auto add_trivial = [&](Vec2 z, const CellLocation& lz, std::vector<TangentChain>& dst) {
        if (lz.kind != CellLocation::Kind::edge) return;
        const VoronoiEdge& e = d.edges()[lz.edge];
        double u = edge_param(e, z);
        for (int s : {+1, -1}) {
            TangentChain tc;
            tc.path.start = z;
            tc.edge = lz.edge;
            tc.u = u;
            tc.sgn = s;
            tc.q = e.point + u * e.dir;
            dst.push_back(tc);
        }
    };
    auto gather = [&](Vec2 z, int Kz, std::vector<TangentChain>& tch,
                      std::vector<CornerChain>& cch, std::vector<FanProbe>* folds) {
        SideScan s1 = scan_side(d, z, r_cap, Kz, S);
        tch.insert(tch.end(), s1.tchains.begin(), s1.tchains.end());
        cch.insert(cch.end(), s1.cchains.begin(), s1.cchains.end());
        if (folds) folds->insert(folds->end(), s1.folds.begin(), s1.folds.end());
        if (r_low < 0.9 * r_cap) {
            SideScan s2 = scan_side(d, z, r_low, Kz, S);
            tch.insert(tch.end(), s2.tchains.begin(), s2.tchains.end());
            cch.insert(cch.end(), s2.cchains.begin(), s2.cchains.end());
            if (folds) folds->insert(folds->end(), s2.folds.begin(), s2.folds.end());
        }
    };
    auto compose_all = [&](const std::vector<TangentChain>& xtc,
                           const std::vector<TangentChain>& ytc,
                           const std::vector<CornerChain>& xcc,
                           const std::vector<CornerChain>& ycc) {
        for (const auto& a : xtc)
            for (const auto& b : ytc) {
                auto g = compose_slide(d, a, b, S);
                if (g) accept(std::move(*g));
            }
        for (const auto& a : xcc)
            for (const auto& b : ycc) {
                auto g = compose_corner(a, b, a.corner);
                if (g) accept(std::move(*g));
            }
    };
    std::vector<TangentChain> xt = sx.tchains, yt;
    std::vector<CornerChain> xcorn = sx.cchains, ycorn;
    if (r_low < 0.9 * r_cap) {
        SideScan sx2 = scan_side(d, x, r_low, K, S);
        xt.insert(xt.end(), sx2.tchains.begin(), sx2.tchains.end());
        xcorn.insert(xcorn.end(), sx2.cchains.begin(), sx2.cchains.end());
    }
    add_trivial(x, lx, xt);
    bool want_y_side = !xt.empty() || !xcorn.empty();
    if (want_y_side) {
        gather(y, K, yt, ycorn);
        add_trivial(y, ly, yt);
        compose_all(xt, yt, xcorn, ycorn);
    }

    // the competitor bound comes from an explicit admissible curve, so any
    // best candidate above it provably missed the minimizer; treat that the
    // same as finding nothing
    auto best_len = [&]() {
        double b = kInf;
        for (const auto& g : cands) b = std::min(b, g.total_qh_len);
        return b;
    };
    const double comp_gate = comp * (1.0 + 1e-6) + 1e-9;

    // shadowed targets the coarse fan stepped over: retry with a denser fan
    if (best_len() > comp_gate) {
        std::vector<TangentChain> xt2, yt2;
        std::vector<CornerChain> xc2, yc2;
        gather(x, 4 * K, xt2, xc2);
        gather(y, 4 * K, yt2, yc2);
        add_trivial(x, lx, xt2);
        add_trivial(y, ly, yt2);
        compose_all(xt2, yt2, xc2, yc2);
    }

    // grid-oracle rescue as a last resort: the lattice estimate pins the
    // length scale, so rescan densely there instead of at the inflated cap,
    // whose fan has spread so far that basins and tangency jumps alike fall
    // between probes
    if (best_len() > comp_gate && opts.oracle_fallback) {
        try {
            double spacing = std::min(dx, dy) / 10.0;
            OracleParams op;
            op.budget_hint = comp;
            auto orr = oracle_distance(d, x, y, spacing, op);
            Vec2 sd = oracle_seed_direction(orr, x);
            double phi0 = std::atan2(sd.y, sd.x);
            for (double dphi : {0.0, 0.05, -0.05, 0.15, -0.15, 0.3, -0.3}) {
                if (best_len() <= comp_gate) break;
                SolveOut so = refine_shot(d, x, y, phi0 + dphi, orr.richardson_estimate, tol,
                                          1.5 * r_cap, opts.max_iter);
                best_resid = std::min(best_resid, so.resid);
                if (so.ok) {
                    try {
                        accept(shoot(d, x, unit_vec(so.phi), so.r));
                    } catch (...) {
                    }
                }
            }
            if (best_len() > comp_gate) {
                double r3 = 1.1 * orr.richardson_estimate + 0.05;
                int K3 = std::max(8 * K, 512);
                SideScan fx = scan_side(d, x, r3, K3, S);
                std::vector<std::pair<double, int>> ord3;
                for (int k = 0; k < K3; ++k) {
                    if (!fx.probes[k].ok) continue;
                    ord3.push_back({path_closest(fx.probes[k].path, y, nullptr), k});
                }
                std::sort(ord3.begin(), ord3.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
                int tried = 0;
                for (auto& [dd, k] : ord3) {
                    if (tried++ >= 48 || best_len() <= comp_gate) break;
                    double tb = 0.0;
                    path_closest(fx.probes[k].path, y, &tb);
                    SolveOut so = refine_shot(d, x, y, fx.probes[k].phi, tb, tol,
                                              1.5 * r_cap, opts.max_iter);
                    best_resid = std::min(best_resid, so.resid);
                    if (so.ok) {
                        try {
                            accept(shoot(d, x, unit_vec(so.phi), so.r));
                        } catch (...) {
                        }
                    }
                }
                if (best_len() > comp_gate) {
                    SideScan fy = scan_side(d, y, r3, K3, S);
                    std::vector<TangentChain> xt3 = fx.tchains, yt3 = fy.tchains;
                    add_trivial(x, lx, xt3);
                    add_trivial(y, ly, yt3);
                    if (dbg())
                        std::fprintf(stderr,
                                     "[cnx] rescue chains x:t=%zu c=%zu  y:t=%zu c=%zu\n",
                                     xt3.size(), fx.cchains.size(), yt3.size(),
                                     fy.cchains.size());
                    compose_all(xt3, yt3, fx.cchains, fy.cchains);
                }
            }
        } catch (...) {
        }
    }

    if (cands.empty())
        throw ConvergenceError("connect: no geodesic reached the target point", best_resid);
    if (best_len() > comp_gate)
        throw ConvergenceError("connect: best path exceeds the competitor upper bound",
                               best_len() - comp);

    std::sort(cands.begin(), cands.end(), [](const GeodesicPath& a, const GeodesicPath& b) {
        return a.total_qh_len < b.total_qh_len;
    });
    double pos_tol = 1e-6 * S;
    std::vector<GeodesicPath> distinct;
    for (auto& c : cands) {
        bool dup = false;
        for (const auto& kept : distinct)
            if (same_path(c, kept, pos_tol)) {
                dup = true;
                break;
            }
        if (!dup) distinct.push_back(std::move(c));
        if (distinct.size() >= 16) break;
    }
    res.distance = distinct.front().total_qh_len;
    // minimizers only; solutions clustered at 1e-6. Distinct solutions more
    // than the cluster width above the minimum are longer local geodesics,
    // not geodesics, and are dropped.
    double tie = res.distance + 1e-6 * std::max(1.0, res.distance);
    for (auto& g : distinct)
        if (g.total_qh_len <= tie) res.paths.push_back(std::move(g));
    res.unique = res.paths.size() == 1;
    return res;
}

double qh_distance(const VoronoiDomain& d, Vec2 x, Vec2 y) {
    if (x.x == y.x && x.y == y.y) return 0.0;
    return connect(d, x, y).distance;
}

// ------------------------------------------------------------------
// ball tracing

QhBall trace_ball(const VoronoiDomain& d, Vec2 x, double r, int n_samples, Exec exec) {
    if (n_samples < 16) throw InputError("trace_ball: need at least 16 samples");
    if (!(r >= 0.0) || !std::isfinite(r))
        throw InputError("trace_ball: radius must be finite and nonnegative");
    if (!(d.delta(x) > 0.0))
        throw std::domain_error("trace_ball: center lies on the boundary");

    QhBall ball;
    ball.center = x;
    ball.radius = r;
    double sc = std::max(d.extent(), d.delta(x));
    double gap_thr = sc / 100.0;

    auto eval_batch = [&](const std::vector<double>& ph) {
        std::vector<QhBall::Sample> out(ph.size());
        std::vector<char> ok(ph.size(), 0);
        int threads = exec_threads(exec);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads) if (exec == Exec::openmp)
#endif
        for (int i = 0; i < (int)ph.size(); ++i) {
            try {
                QhBall::Sample s;
                s.phi = ph[i];
                s.path = shoot(d, x, unit_vec(ph[i]), r);
                s.endpoint = s.path.end();
                out[i] = std::move(s);
                ok[i] = 1;
            } catch (...) {
            }
        }
#ifndef _OPENMP
        (void)threads;
#endif
        for (size_t i = 0; i < ph.size(); ++i)
            if (!ok[i]) throw ConvergenceError("trace_ball: sample failed to integrate");
        return out;
    };

    std::vector<double> phis(n_samples);
    for (int i = 0; i < n_samples; ++i) phis[i] = -kPi + 2.0 * kPi * i / n_samples;
    std::vector<QhBall::Sample> smp = eval_batch(phis);

    for (int pass = 0; pass < 16 && smp.size() < 4096; ++pass) {
        std::vector<double> newp;
        for (size_t i = 0; i < smp.size(); ++i) {
            size_t j = (i + 1) % smp.size();
            double width = (j == 0 ? smp[j].phi + 2.0 * kPi : smp[j].phi) - smp[i].phi;
            if (width <= 1e-7) continue; // genuine jump of the endpoint map
            if (dist(smp[i].endpoint, smp[j].endpoint) > gap_thr)
                newp.push_back(pr(smp[i].phi + 0.5 * width));
        }
        if (newp.empty()) break;
        std::vector<QhBall::Sample> extra = eval_batch(newp);
        for (auto& s : extra) smp.push_back(std::move(s));
        std::sort(smp.begin(), smp.end(),
                  [](const QhBall::Sample& a, const QhBall::Sample& b) { return a.phi < b.phi; });
        smp.erase(std::unique(smp.begin(), smp.end(),
                              [](const QhBall::Sample& a, const QhBall::Sample& b) {
                                  return a.phi == b.phi;
                              }),
                  smp.end());
    }
    ball.samples = std::move(smp);
    return ball;
}

} // namespace qhgeo
