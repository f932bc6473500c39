#pragma once
#include <vector>

#include "qhgeo/geometry.hpp"
#include "qhgeo/parallel.hpp"
#include "qhgeo/spiral.hpp"
#include "qhgeo/voronoi.hpp"

namespace qhgeo {

// Junction taxonomy along a traced path. Transversal edge hits cross;
// tangential hits graze through and are logged as touching; straight runs
// along an edge open and close with the sliding pair; corner covers both
// corner hits and pass-through corners between collinear edges.
enum class EventKind { crossing, touching, sliding_start, sliding_end, corner };

struct ShootEvent {
    double t = 0.0;              // global path parameter of the event
    CellLocation location;
    EventKind kind = EventKind::crossing;
    int cell_from = -1;
    int cell_to = -1;
    bool flagged = false;        // ambiguity resolved by tie-break, never silent
};

// One piece of a path: a spiral inside a cell or a straight run on an edge.
// Local parameter starts at 0 on every piece.
struct PathPiece {
    enum class Kind { spiral, straight };
    Kind kind = Kind::spiral;
    SpiralArc spiral;
    StraightArc straight;
    int cell = -1;               // owning cell for spiral pieces

    double len() const { return kind == Kind::spiral ? spiral.qh_len : straight.qh_len; }
    Vec2 point(double t) const {
        return kind == Kind::spiral ? spiral.point(t) : straight.point(t);
    }
    Vec2 tangent(double t) const {
        return kind == Kind::spiral ? spiral.tangent(t) : straight.tangent(t);
    }
    Vec2 start() const { return point(0.0); }
    Vec2 end() const { return point(len()); }
};

// Canonically parametrized locally geodesic path: |gamma'(t)| = delta(gamma(t)),
// t in [0, total_qh_len]. Pieces are glued C1; events are ordered by t.
struct GeodesicPath {
    Vec2 start;
    double total_qh_len = 0.0;
    std::vector<PathPiece> pieces;
    std::vector<ShootEvent> events;

    Vec2 point(double t) const;    // t clamped to [0, total_qh_len]
    Vec2 tangent(double t) const;
    Vec2 end() const { return pieces.empty() ? start : pieces.back().end(); }
};

// Integrates the unique local geodesic from x with unit initial tangent
// `direction` for quasihyperbolic length exactly r. Within a cell the path
// is the spiral about the cell's nucleus; transversal edge crossings keep
// the tangent and restart the spiral about the neighbor nucleus; tangential
// contacts graze through; a start on an edge pointing along it slides until
// the window ends. Corner continuations probe every incident cell's spiral
// and keep the one that stays inside (ties: smallest |alpha|, flagged).
// Throws std::domain_error when delta(x) = 0, InputError on a zero
// direction or negative r, ConvergenceError past 10^4 pieces.
GeodesicPath shoot(const VoronoiDomain& d, Vec2 x, Vec2 direction, double r);

// Endpoint of shoot with direction (cos phi, sin phi).
Vec2 exp_map(const VoronoiDomain& d, Vec2 x, double phi, double r);

// Same path traversed backward; events mirrored.
GeodesicPath reverse_path(const GeodesicPath& p);

// Continuation of p from its endpoint along its terminal tangent for extra
// length; the concatenation is C1.
GeodesicPath prolong(const VoronoiDomain& d, const GeodesicPath& p, double extra);

struct ConnectOptions {
    int angles = 64;             // multi-start sweep size
    int max_iter = 48;           // two-dimensional secant iterations per start
    bool oracle_fallback = true; // seed from the grid oracle when all else fails
    double length_cap = 0.0;     // 0 = automatic competitor-based cap
    bool closed_forms = true;    // allow the single-nucleus exact shortcut
};

struct ConnectResult {
    // minimizers only: every kept path has length within the clustering
    // tolerance (1e-6 scaled) of distance; longer locally geodesic solutions
    // found along the way are dropped
    std::vector<GeodesicPath> paths;
    double distance = 0.0;
    bool unique = true;   // exactly one distinct minimizer
};

// Two-point solve: multi-start shooting plus secant refinement on
// (angle, length) until |endpoint - y| <= 1e-8 * delta(y), augmented by
// edge-tangency composites (chains that reach an edge tangentially, slide,
// and leave tangentially; such paths are limits of no shot family) and
// corner composites. distance is the minimal length; unique means exactly
// one distinct path attains it. Throws ConvergenceError carrying the best
// residual when nothing converges.
ConnectResult connect(const VoronoiDomain& d, Vec2 x, Vec2 y,
                      const ConnectOptions& opts = {});

// connect(...).distance, with the coincident-point shortcut 0.
double qh_distance(const VoronoiDomain& d, Vec2 x, Vec2 y);

struct QhBall {
    Vec2 center;
    double radius = 0.0;
    struct Sample {
        double phi = 0.0;
        Vec2 endpoint;
        GeodesicPath path;
    };
    std::vector<Sample> samples;   // ordered by phi
};

// Ball boundary through the exponential map: n_samples equispaced angles,
// refined by angle bisection wherever consecutive endpoints are farther
// apart than scale/100 (scale = max(nucleus bounding box diagonal,
// delta(x))), with a depth cap since tangency fans are genuine jumps of the
// endpoint map. Samples may be evaluated in parallel; assembly order is by
// angle, so results do not depend on the execution mode.
QhBall trace_ball(const VoronoiDomain& d, Vec2 x, double r, int n_samples,
                  Exec exec = default_exec());

} // namespace qhgeo
