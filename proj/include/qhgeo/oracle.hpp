#pragma once
#include <cstdint>
#include <vector>

#include "qhgeo/geometry.hpp"
#include "qhgeo/parallel.hpp"
#include "qhgeo/voronoi.hpp"

namespace qhgeo {

// Weight of one lattice edge: two-point Gauss quadrature of 1/delta along
// the straight segment. Positive and symmetric in a, b.
double grid_edge_weight(const VoronoiDomain& d, Vec2 a, Vec2 b);

// Lattice admission used by the oracle: delta(z) must clear the exclusion
// radius 2*spacing, and the two-sided lower bound
//   lb(x,z) + lb(z,y) <= budget,
// with lb(u,z) = max(log(1 + |u-z|/min(delta(u),delta(z))),
//                    |log(delta(u)/delta(z))|),
// must not rule z out. Every point of a true shortest path passes the test
// whenever budget is a genuine upper bound on the distance.
bool grid_node_admissible(const VoronoiDomain& d, Vec2 z, double spacing,
                          Vec2 x, Vec2 y, double budget);

// Explicit materialization of the oracle lattice over a window, for
// inspection and tests. oracle_distance itself expands the same lattice
// lazily from x, so only the admissible corridor is ever touched.
struct GridGraph {
    Vec2 origin;                 // node (i,j) sits at origin + (i,j)*spacing
    double spacing = 0.0;
    int imin = 0, imax = -1, jmin = 0, jmax = -1;
    std::vector<int> node_id;    // row-major over the window, -1 = excluded
    std::vector<Vec2> nodes;     // positions of admissible nodes

    int id_at(int i, int j) const {
        if (i < imin || i > imax || j < jmin || j > jmax) return -1;
        return node_id[size_t(j - jmin) * size_t(imax - imin + 1) + size_t(i - imin)];
    }
};

// The 16-neighbor stencil: axis, diagonal, and knight moves.
const std::vector<std::pair<int, int>>& grid_stencil();

GridGraph build_grid_graph(const VoronoiDomain& d, Vec2 origin, double spacing,
                           int imin, int imax, int jmin, int jmax,
                           Vec2 x, Vec2 y, double budget,
                           uint64_t max_nodes = 10'000'000);

struct OracleParams {
    uint64_t max_nodes = 10'000'000;
    // Optional upper bound on the distance, e.g. a length the caller already
    // holds. Only used to prune the lattice; a hint below the true distance
    // can only disconnect the grid, never bias the answer, and triggers a
    // retry with the oracle's own bound.
    double budget_hint = 0.0;
    Exec exec = default_exec();
    int smooth_passes = 200;
};

struct OracleResult {
    double distance = 0.0;             // raw shortest-path value at spacing_used
    Polyline path;                     // smoothed shortest path, x first
    double spacing_used = 0.0;
    double richardson_estimate = 0.0;  // from smoothed lengths at h and h/2
    std::vector<double> cum_qh;        // cumulative qh length at each path vertex
};

// Brute-force shortest path from x to y: Dijkstra on the lattice at the
// requested spacing and at half of it, followed by a local straightening of
// the polyline. The raw Dijkstra value converges to the distance from above
// (lattice paths are admissible competitors); richardson_estimate removes
// the leading discretization term. Throws ResolutionError when an endpoint
// sits within 2*spacing of a nucleus, when the lattice would exceed
// max_nodes, or when no lattice path connects the endpoints.
OracleResult oracle_distance(const VoronoiDomain& d, Vec2 x, Vec2 y, double spacing,
                             const OracleParams& params);
OracleResult oracle_distance(const VoronoiDomain& d, Vec2 x, Vec2 y, double spacing);

// Unit tangent estimate at x: least-squares line fit over the leading path
// vertices spanning qh length ~0.1, oriented away from x. Falls back to the
// first segment when the window holds fewer than three vertices.
Vec2 oracle_seed_direction(const OracleResult& r, Vec2 x);

// Upper bound on the distance from concrete competitor curves: the straight
// segment, else bent two-leg detours when the segment runs into a nucleus.
double competitor_upper_bound(const VoronoiDomain& d, Vec2 x, Vec2 y);

} // namespace qhgeo
