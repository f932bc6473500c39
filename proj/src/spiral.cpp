#include "qhgeo/spiral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qhgeo/errors.hpp"

namespace qhgeo {

double straight_qh_length(const StraightArc& a) {
    if (!(a.h > 0.0)) throw std::domain_error("straight arc: clearance must be positive");
    return std::abs(std::asinh(a.s_end / a.h) - std::asinh(a.s_start / a.h));
}

double punctured_distance(Vec2 s, Vec2 x, Vec2 y) {
    double rx = dist(x, s), ry = dist(y, s);
    if (!(rx > 0.0) || !(ry > 0.0))
        throw std::domain_error("punctured_distance: point coincides with the puncture");
    double phi = std::abs(ang(x - s, y - s));
    return std::hypot(std::log(rx / ry), phi);
}

PuncturedGeodesic punctured_geodesic(Vec2 s, Vec2 x, Vec2 y) {
    double rx = dist(x, s), ry = dist(y, s);
    if (!(rx > 0.0) || !(ry > 0.0))
        throw std::domain_error("punctured_geodesic: point coincides with the puncture");
    double dlog = std::log(ry / rx);
    double turn = ang(y - s, x - s);           // signed, in (-pi, pi]
    double th0 = arg(x - s);

    PuncturedGeodesic g;
    auto make_arc = [&](double w) {
        SpiralArc a;
        a.center = s;
        a.rho0 = rx;
        a.theta0 = th0;
        a.qh_len = std::hypot(dlog, w);
        a.alpha = a.qh_len > 0.0 ? std::atan2(w, dlog) : 0.0;
        return a;
    };
    if (std::abs(turn - kPi) <= 1e-12) {       // opposition: both windings tie
        g.unique = false;
        g.arcs.push_back(make_arc(kPi));
        g.arcs.push_back(make_arc(-kPi));
    } else {
        g.arcs.push_back(make_arc(turn));
    }
    return g;
}

std::vector<double> spiral_line_intersections(const SpiralArc& arc, Vec2 line_point,
                                              Vec2 line_dir, double w_lo, double w_hi,
                                              double t_max, double t_min) {
    Vec2 dir = normalized(line_dir);
    Vec2 n = rot90(dir);
    const double b = std::sin(arc.alpha);
    const double phase = arc.theta0 - arg(n);  // n . unit(theta) = cos(theta - arg n)
    const double d0 = dot(arc.center - line_point, n);

    auto f = [&](double t) {
        return arc.rho(t) * std::cos(phase + b * t) + d0;
    };
    auto fp = [&](double t) {
        // d/dt, using cos(alpha)cos(psi) - sin(alpha)sin(psi) = cos(psi + alpha)
        return arc.rho(t) * std::cos(phase + b * t + arc.alpha);
    };

    // monotone spans of f are delimited by the zeros of f', which form the
    // arithmetic progression psi + alpha = pi/2 + k pi
    std::vector<double> brk;
    brk.push_back(std::max(0.0, t_min));
    if (b != 0.0) {
        // extrema sit at first + m * step for every integer m
        double first = (kPi / 2.0 - phase - arc.alpha) / b;
        double step = kPi / std::abs(b);
        double m0 = std::ceil((brk[0] - first) / step);
        for (double m = m0;; m += 1.0) {
            double t = first + m * step;
            if (t >= t_max) break;
            if (t > brk.back()) brk.push_back(t);
            if (brk.size() > 4096) break;   // absurd turn count guard
        }
    }
    brk.push_back(t_max);

    std::vector<double> roots;
    double fu = f(brk[0]);
    for (size_t i = 0; i + 1 < brk.size(); ++i) {
        double u = brk[i], v = brk[i + 1];
        double fv = f(v);
        // a zero exactly at an interior breakpoint is an extremum touching
        // the line: a graze, not a crossing. Skipped by the fu/fv != 0 guard.
        if ((fu < 0.0) != (fv < 0.0) && fu != 0.0 && fv != 0.0) {
            // bisection with Newton polish on a span where f is monotone
            double lo = u, hi = v, flo = fu;
            double t = 0.5 * (lo + hi), ft = f(t);
            for (int it = 0; it < 200; ++it) {
                double fscale = arc.rho(t) + std::abs(d0) + 1.0;
                if (std::abs(ft) < 1e-14 * fscale) break;
                if ((ft < 0.0) == (flo < 0.0)) { lo = t; flo = ft; }
                else hi = t;
                if (hi - lo < 2e-16 * std::max(1.0, std::abs(lo))) {
                    t = 0.5 * (lo + hi);
                    ft = f(t);
                    break;
                }
                double tn = t - ft / fp(t);
                t = (std::isfinite(tn) && tn > lo && tn < hi) ? tn : 0.5 * (lo + hi);
                ft = f(t);
            }
            roots.push_back(t);
        }
        fu = fv;
    }
    if (f(t_max) == 0.0) roots.push_back(t_max);

    std::vector<double> out;
    for (double t : roots) {
        if (t <= t_min || t > t_max) continue;
        double p = dot(arc.point(t) - line_point, dir);
        if (p >= w_lo && p <= w_hi) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const VoronoiDomain& d, Vec2 a, Vec2 b, double fa, double fm, double fb,
             double whole, double eps, int depth) {
    Vec2 m = 0.5 * (a + b);
    Vec2 lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double dl = d.delta(lm), dr = d.delta(rm);
    if (dl <= 0.0 || dr <= 0.0)
        throw std::domain_error("qh length: polyline passes through a boundary point");
    double fl = 1.0 / dl, fr = 1.0 / dr;
    double seg = dist(a, b);
    double left = simpson(fa, fl, fm, 0.5 * seg);
    double right = simpson(fm, fr, fb, 0.5 * seg);
    double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * eps)
        return left + right + err / 15.0;
    return adapt(d, a, m, fa, fl, fm, left, 0.5 * eps, depth - 1) +
           adapt(d, m, b, fm, fr, fb, right, 0.5 * eps, depth - 1);
}

double segment_qh_length(const VoronoiDomain& d, Vec2 a, Vec2 b, double rel_tol) {
    double seg = dist(a, b);
    if (seg == 0.0) return 0.0;
    double da = d.delta(a), db = d.delta(b);
    Vec2 m = 0.5 * (a + b);
    double dm = d.delta(m);
    if (da <= 0.0 || db <= 0.0 || dm <= 0.0)
        throw std::domain_error("qh length: polyline passes through a boundary point");
    double fa = 1.0 / da, fm = 1.0 / dm, fb = 1.0 / db;
    double whole = simpson(fa, fm, fb, seg);
    double eps = std::max(rel_tol * whole, 1e-300);
    return adapt(d, a, b, fa, fm, fb, whole, eps, 48);
}

} // namespace

double qh_length_of_polyline(const VoronoiDomain& d, const Polyline& p, double rel_tol) {
    if (p.vertices.size() < 2) return 0.0;
    double total = 0.0;
    size_t n = p.vertices.size();
    size_t segs = p.closed ? n : n - 1;
    for (size_t i = 0; i < segs; ++i)
        total += segment_qh_length(d, p.vertices[i], p.vertices[(i + 1) % n], rel_tol);
    return total;
}

} // namespace qhgeo
