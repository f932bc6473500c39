#pragma once
#include <vector>

#include "qhgeo/geometry.hpp"

namespace qhgeo {

// One Voronoi edge: an interval of the perpendicular bisector of its two
// nuclei. point is the nuclei midpoint, which is also the foot of the
// perpendicular dropped from either nucleus onto the carrier line.
// Parameters run along dir; lo/hi may be +-infinity.
struct VoronoiEdge {
    Vec2 point;
    Vec2 dir;        // unit
    double lo = 0.0;
    double hi = 0.0;
    int cell_a = -1; // neighbor cells, cell_a < cell_b
    int cell_b = -1;
    double h = 0.0;  // clearance: distance from either nucleus to the carrier
};

struct VoronoiCell {
    Vec2 nucleus;
    std::vector<int> edges;   // edge ids, sorted by outward normal angle
    bool bounded = false;
};

struct VoronoiCorner {
    Vec2 position;
    std::vector<int> edges;   // incident edge ids, sorted
    std::vector<int> cells;   // incident cell ids, sorted
};

struct CellLocation {
    enum class Kind { interior, edge, corner };
    Kind kind = Kind::interior;
    int cell = -1;    // nearest cell, always set
    int edge = -1;    // set for Kind::edge
    int corner = -1;  // set for Kind::corner
};

// A plane domain whose boundary is a finite point set, carried as the exact
// Voronoi diagram of those points. Cells are convex and may be unbounded;
// no bounding-box clipping is applied anywhere.
class VoronoiDomain {
public:
    // Validates, sorts nuclei lexicographically, and intersects half-planes
    // pairwise; O(N^2) per cell. Rejects empty input, non-finite points, and
    // pairs closer than 1e-9.
    static VoronoiDomain build(std::vector<Vec2> boundary_points);

    const std::vector<Vec2>& nuclei() const { return nuclei_; }
    const std::vector<VoronoiCell>& cells() const { return cells_; }
    const std::vector<VoronoiEdge>& edges() const { return edges_; }
    const std::vector<VoronoiCorner>& corners() const { return corners_; }

    // Distance to the boundary point set.
    double delta(Vec2 z) const;
    int nearest_nucleus(Vec2 z) const;

    // Classifies z against the cell complex. Points within tol of a corner
    // report the corner; otherwise within tol of an edge report that edge.
    CellLocation locate(Vec2 z, double tol = 1e-9) const;

    // Nucleus of the cell across edge e from from_cell; the two nuclei are
    // mirror images in the edge carrier. Throws std::logic_error when
    // from_cell is not adjacent to e.
    Vec2 mirror_nucleus(int edge_id, int from_cell) const;

    // Diagonal of the nucleus bounding box; 0 for a single nucleus.
    double extent() const { return extent_; }

private:
    std::vector<Vec2> nuclei_;
    std::vector<VoronoiCell> cells_;
    std::vector<VoronoiEdge> edges_;
    std::vector<VoronoiCorner> corners_;
    double extent_ = 0.0;
};

} // namespace qhgeo
