#pragma once
#include <vector>

#include "qhgeo/geometry.hpp"
#include "qhgeo/voronoi.hpp"

namespace qhgeo {

// Logarithmic spiral about a center S, in the parametrization whose speed
// equals the distance to S:
//   rho(t)   = rho0 * exp(t cos alpha)
//   theta(t) = theta0 + t sin alpha
// alpha is the constant angle from the outward radius point(t) - S to the
// tangent. alpha = 0 runs radially outward, alpha = pi/2 is the
// counterclockwise circle. Under w = log(z - S) the arc is a straight
// segment of direction (cos alpha, sin alpha) traversed at unit speed, so t
// is arclength of the image and qh_len is the metric length when S is the
// nearest boundary point throughout.
struct SpiralArc {
    Vec2 center;
    double rho0 = 1.0;
    double theta0 = 0.0;   // carried unreduced so multi-turn arcs stay continuous
    double alpha = 0.0;    // principal
    double qh_len = 0.0;

    Vec2 point(double t) const {
        double rho = rho0 * std::exp(t * std::cos(alpha));
        return center + rho * unit_vec(theta0 + t * std::sin(alpha));
    }
    // unit tangent
    Vec2 tangent(double t) const {
        double th = theta0 + t * std::sin(alpha);
        return unit_vec(th + alpha);
    }
    double rho(double t) const { return rho0 * std::exp(t * std::cos(alpha)); }
    Vec2 start() const { return point(0.0); }
    Vec2 end() const { return point(qh_len); }
};

// Straight run along a Voronoi edge. Offsets s are measured along dir from
// the foot of the nucleus perpendicular (the nuclei midpoint); h is the
// clearance, so the boundary distance at offset s is sqrt(h^2 + s^2).
// Canonical parametrization: s(t) = h sinh(asinh(s_start/h) + t).
struct StraightArc {
    int edge = -1;          // edge id in the domain; -1 when free-standing
    Vec2 foot;
    Vec2 dir;               // unit, direction of travel; s_end > s_start
    double h = 1.0;
    double s_start = 0.0;
    double s_end = 0.0;
    double qh_len = 0.0;

    Vec2 point(double t) const {
        double s = h * std::sinh(std::asinh(s_start / h) + t);
        return foot + s * dir;
    }
    Vec2 tangent(double) const { return dir; }
    Vec2 start() const { return foot + s_start * dir; }
    Vec2 end() const { return foot + s_end * dir; }
};

// Metric length of a straight arc: asinh(s_end/h) - asinh(s_start/h).
double straight_qh_length(const StraightArc& a);

// Exact quasihyperbolic distance of the plane punctured at s:
// sqrt(log^2(|x-s|/|y-s|) + phi^2) with phi in [0, pi] the angle at s.
double punctured_distance(Vec2 s, Vec2 x, Vec2 y);

struct PuncturedGeodesic {
    std::vector<SpiralArc> arcs;   // one arc, or two at exact opposition
    bool unique = true;
};

// Geodesic(s) of the punctured plane from x to y. At angular separation
// within 1e-12 of pi both extremal arcs are returned and unique is false.
PuncturedGeodesic punctured_geodesic(Vec2 s, Vec2 x, Vec2 y);

// Parameters t in (t_min, t_max] where the spiral meets the line
// {line_point + p * line_dir : p in [w_lo, w_hi]}. Roots are isolated on
// monotone spans between the closed-form extrema of the signed offset and
// polished by safeguarded Newton to |f| < 1e-12 * local scale. Tangential
// grazes (no sign change) are by construction not reported.
std::vector<double> spiral_line_intersections(const SpiralArc& a, Vec2 line_point,
                                              Vec2 line_dir, double w_lo, double w_hi,
                                              double t_max, double t_min = 1e-11);

// Quasihyperbolic length of a polyline by per-segment adaptive quadrature of
// 1/delta, to relative tolerance rel_tol. Throws std::domain_error if the
// polyline passes through a boundary point.
double qh_length_of_polyline(const VoronoiDomain& d, const Polyline& p,
                             double rel_tol = 1e-8);

} // namespace qhgeo
