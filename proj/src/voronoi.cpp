#include "qhgeo/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qhgeo/errors.hpp"

namespace qhgeo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Clips the bisector line of (i,j) against the half-plane of i vs k.
// Returns false when the interval dies.
bool clip_interval(Vec2 carrier_point, Vec2 carrier_dir, Vec2 ai, Vec2 ak,
                   double& lo, double& hi) {
    Vec2 n = ak - ai;                       // outward normal of the i-vs-k half-plane
    Vec2 m = 0.5 * (ai + ak);
    double A = dot(carrier_point - m, n);   // constraint value at parameter 0
    double B = dot(carrier_dir, n);         // growth along the carrier
    double eps = 1e-14 * norm(n) * std::max(1.0, norm(carrier_point - m));
    if (std::abs(B) <= eps) {
        return A <= eps;                    // carrier parallel to the constraint
    }
    double t = -A / B;
    if (B > 0.0) hi = std::min(hi, t);
    else lo = std::max(lo, t);
    return lo < hi;
}

} // namespace

VoronoiDomain VoronoiDomain::build(std::vector<Vec2> pts) {
    if (pts.empty()) throw InputError("domain: boundary point set is empty");
    for (const Vec2& p : pts)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw InputError("domain: non-finite boundary point");

    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    const int n = static_cast<int>(pts.size());
    for (int i = 0; i + 1 < n; ++i)
        if (dist(pts[i], pts[i + 1]) <= 1e-9)
            throw InputError("domain: boundary points closer than 1e-9");
    // lexicographic neighbors are not the only candidates for near-duplicates,
    // but separation below 1e-9 with distinct x keys still needs a full check
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (pts[j].x - pts[i].x > 1e-9) break;
            if (dist(pts[i], pts[j]) <= 1e-9)
                throw InputError("domain: boundary points closer than 1e-9");
        }

    VoronoiDomain d;
    d.nuclei_ = pts;
    d.cells_.resize(n);
    for (int i = 0; i < n; ++i) d.cells_[i].nucleus = pts[i];

    Vec2 bb_lo = pts[0], bb_hi = pts[0];
    for (const Vec2& p : pts) {
        bb_lo.x = std::min(bb_lo.x, p.x); bb_lo.y = std::min(bb_lo.y, p.y);
        bb_hi.x = std::max(bb_hi.x, p.x); bb_hi.y = std::max(bb_hi.y, p.y);
    }
    d.extent_ = dist(bb_lo, bb_hi);
    double scale = std::max(1.0, d.extent_);

    // every surviving piece of a pairwise bisector becomes one edge
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Vec2 mid = 0.5 * (pts[i] + pts[j]);
            Vec2 dir = normalized(rot90(pts[j] - pts[i]));
            double lo = -kInf, hi = kInf;
            bool alive = true;
            for (int k = 0; k < n && alive; ++k) {
                if (k == i || k == j) continue;
                alive = clip_interval(mid, dir, pts[i], pts[k], lo, hi);
            }
            if (!alive || !(hi - lo > 1e-12 * scale)) continue;
            VoronoiEdge e;
            e.point = mid;
            e.dir = dir;
            e.lo = lo;
            e.hi = hi;
            e.cell_a = i;
            e.cell_b = j;
            e.h = 0.5 * dist(pts[i], pts[j]);
            int id = static_cast<int>(d.edges_.size());
            d.edges_.push_back(e);
            d.cells_[i].edges.push_back(id);
            d.cells_[j].edges.push_back(id);
        }
    }

    for (int i = 0; i < n; ++i) {
        auto& cell = d.cells_[i];
        std::sort(cell.edges.begin(), cell.edges.end(), [&](int ea, int eb) {
            const VoronoiEdge& A = d.edges_[ea];
            const VoronoiEdge& B = d.edges_[eb];
            Vec2 na = (A.cell_a == i ? d.nuclei_[A.cell_b] : d.nuclei_[A.cell_a]) - pts[i];
            Vec2 nb = (B.cell_a == i ? d.nuclei_[B.cell_b] : d.nuclei_[B.cell_a]) - pts[i];
            double aa = arg(na), ab = arg(nb);
            return aa != ab ? aa < ab : ea < eb;
        });
        cell.bounded = !cell.edges.empty();
        for (int e : cell.edges)
            if (!std::isfinite(d.edges_[e].lo) || !std::isfinite(d.edges_[e].hi))
                cell.bounded = false;
        if (n == 1) cell.bounded = false;
    }

    // finite edge endpoints cluster into corners
    struct EndRef { Vec2 p; int edge; };
    std::vector<EndRef> ends;
    for (int e = 0; e < static_cast<int>(d.edges_.size()); ++e) {
        const VoronoiEdge& E = d.edges_[e];
        if (std::isfinite(E.lo)) ends.push_back({E.point + E.lo * E.dir, e});
        if (std::isfinite(E.hi)) ends.push_back({E.point + E.hi * E.dir, e});
    }
    std::sort(ends.begin(), ends.end(), [](const EndRef& a, const EndRef& b) {
        return a.p.x != b.p.x ? a.p.x < b.p.x : (a.p.y != b.p.y ? a.p.y < b.p.y : a.edge < b.edge);
    });
    double merge_tol = 1e-9 * scale;
    std::vector<char> used(ends.size(), 0);
    for (size_t s = 0; s < ends.size(); ++s) {
        if (used[s]) continue;
        VoronoiCorner c;
        c.position = ends[s].p;
        c.edges.push_back(ends[s].edge);
        used[s] = 1;
        for (size_t t = s + 1; t < ends.size(); ++t) {
            if (used[t]) continue;
            if (ends[t].p.x - ends[s].p.x > merge_tol) break;
            if (dist(ends[t].p, ends[s].p) <= merge_tol) {
                c.edges.push_back(ends[t].edge);
                used[t] = 1;
            }
        }
        std::sort(c.edges.begin(), c.edges.end());
        c.edges.erase(std::unique(c.edges.begin(), c.edges.end()), c.edges.end());
        for (int e : c.edges) {
            c.cells.push_back(d.edges_[e].cell_a);
            c.cells.push_back(d.edges_[e].cell_b);
        }
        std::sort(c.cells.begin(), c.cells.end());
        c.cells.erase(std::unique(c.cells.begin(), c.cells.end()), c.cells.end());
        d.corners_.push_back(std::move(c));
    }

    return d;
}

double VoronoiDomain::delta(Vec2 z) const {
    double best = kInf;
    for (const Vec2& a : nuclei_) {
        double dx = z.x - a.x, dy = z.y - a.y;
        best = std::min(best, dx * dx + dy * dy);
    }
    return std::sqrt(best);
}

int VoronoiDomain::nearest_nucleus(Vec2 z) const {
    double best = kInf;
    int arg_min = 0;
    for (int i = 0; i < static_cast<int>(nuclei_.size()); ++i) {
        double dx = z.x - nuclei_[i].x, dy = z.y - nuclei_[i].y;
        double d2 = dx * dx + dy * dy;
        if (d2 < best) { best = d2; arg_min = i; }
    }
    return arg_min;
}

CellLocation VoronoiDomain::locate(Vec2 z, double tol) const {
    if (!std::isfinite(z.x) || !std::isfinite(z.y))
        throw std::domain_error("locate: non-finite point");
    CellLocation loc;
    loc.cell = nearest_nucleus(z);

    int best_corner = -1;
    double best_cd = tol;
    for (int c = 0; c < static_cast<int>(corners_.size()); ++c) {
        double dc = dist(z, corners_[c].position);
        if (dc <= best_cd) { best_cd = dc; best_corner = c; }
    }
    if (best_corner >= 0) {
        loc.kind = CellLocation::Kind::corner;
        loc.corner = best_corner;
        return loc;
    }

    int best_edge = -1;
    double best_ed = tol;
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
        const VoronoiEdge& E = edges_[e];
        double p = dot(z - E.point, E.dir);
        p = std::clamp(p, E.lo, E.hi);
        double de = dist(z, E.point + p * E.dir);
        if (de <= best_ed) { best_ed = de; best_edge = e; }
    }
    if (best_edge >= 0) {
        loc.kind = CellLocation::Kind::edge;
        loc.edge = best_edge;
        return loc;
    }

    loc.kind = CellLocation::Kind::interior;
    return loc;
}

Vec2 VoronoiDomain::mirror_nucleus(int edge_id, int from_cell) const {
    const VoronoiEdge& e = edges_.at(edge_id);
    if (from_cell == e.cell_a) return nuclei_[e.cell_b];
    if (from_cell == e.cell_b) return nuclei_[e.cell_a];
    throw std::logic_error("mirror_nucleus: cell is not adjacent to the edge");
}

} // namespace qhgeo
