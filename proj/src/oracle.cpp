#include "qhgeo/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "qhgeo/errors.hpp"
#include "qhgeo/spiral.hpp"

namespace qhgeo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Gauss-Legendre 2-point abscissae on [0,1]
constexpr double kG0 = 0.5 - 0.28867513459481287;
constexpr double kG1 = 0.5 + 0.28867513459481287;
} // namespace

double grid_edge_weight(const VoronoiDomain& d, Vec2 a, Vec2 b) {
    // canonical endpoint order so the value is bitwise symmetric
    if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
    double len = dist(a, b);
    if (len == 0.0) return 0.0;
    double d0 = d.delta(a + kG0 * (b - a));
    double d1 = d.delta(a + kG1 * (b - a));
    if (d0 <= 0.0 || d1 <= 0.0) return kInf;
    return 0.5 * len * (1.0 / d0 + 1.0 / d1);
}

namespace {
// lower bound on the distance from u (with boundary clearance du) to z
double pair_lower_bound(Vec2 u, double du, Vec2 z, double dz) {
    return std::max(std::log1p(dist(u, z) / std::min(du, dz)),
                    std::abs(std::log(du / dz)));
}
} // namespace

bool grid_node_admissible(const VoronoiDomain& d, Vec2 z, double spacing,
                          Vec2 x, Vec2 y, double budget) {
    double dz = d.delta(z);
    if (dz <= 2.0 * spacing) return false;
    if (!(budget < kInf)) return true;
    return pair_lower_bound(x, d.delta(x), z, dz) +
           pair_lower_bound(y, d.delta(y), z, dz) <= budget;
}

const std::vector<std::pair<int, int>>& grid_stencil() {
    static const std::vector<std::pair<int, int>> s = {
        {1, 0},  {-1, 0}, {0, 1},  {0, -1},
        {1, 1},  {1, -1}, {-1, 1}, {-1, -1},
        {2, 1},  {2, -1}, {-2, 1}, {-2, -1},
        {1, 2},  {1, -2}, {-1, 2}, {-1, -2},
    };
    return s;
}

GridGraph build_grid_graph(const VoronoiDomain& d, Vec2 origin, double spacing,
                           int imin, int imax, int jmin, int jmax,
                           Vec2 x, Vec2 y, double budget, uint64_t max_nodes) {
    if (!(spacing > 0.0)) throw InputError("grid: spacing must be positive");
    GridGraph g;
    g.origin = origin;
    g.spacing = spacing;
    g.imin = imin; g.imax = imax; g.jmin = jmin; g.jmax = jmax;
    if (imax < imin || jmax < jmin) return g;
    size_t cols = size_t(imax - imin + 1), rows = size_t(jmax - jmin + 1);
    g.node_id.assign(cols * rows, -1);
    for (int j = jmin; j <= jmax; ++j) {
        for (int i = imin; i <= imax; ++i) {
            Vec2 z = origin + Vec2{i * spacing, j * spacing};
            if (!grid_node_admissible(d, z, spacing, x, y, budget)) continue;
            if (g.nodes.size() >= max_nodes)
                throw ResolutionError("grid: node budget exceeded");
            g.node_id[size_t(j - jmin) * cols + size_t(i - imin)] = int(g.nodes.size());
            g.nodes.push_back(z);
        }
    }
    return g;
}

namespace {

// offset packing keeps every real key below the target sentinel
constexpr int64_t kIdxOffset = int64_t(1) << 30;
uint64_t pack_ij(int i, int j) {
    return (uint64_t(i + kIdxOffset) << 32) | uint64_t(j + kIdxOffset);
}
int unpack_i(uint64_t k) { return int(int64_t(k >> 32) - kIdxOffset); }
int unpack_j(uint64_t k) { return int(int64_t(k & 0xffffffffu) - kIdxOffset); }

constexpr uint64_t kTargetKey = ~uint64_t(0);

struct LatticePath {
    bool found = false;
    double distance = kInf;
    std::vector<Vec2> vertices;   // x ... y
};

// Dijkstra over the implicit lattice anchored at x, expanded lazily so only
// the admissible corridor is ever visited.
LatticePath lattice_shortest_path(const VoronoiDomain& d, Vec2 x, Vec2 y,
                                  double spacing, double budget, uint64_t max_nodes) {
    const double link_radius = 2.5 * spacing;
    std::unordered_map<uint64_t, signed char> adm;
    std::unordered_map<uint64_t, double> dist_of;
    std::unordered_map<uint64_t, uint64_t> parent;
    uint64_t admitted = 0;

    const double dx = d.delta(x), dy = d.delta(y);
    auto admissible = [&](uint64_t key, Vec2 z) {
        auto it = adm.find(key);
        if (it != adm.end()) return it->second > 0;
        double dz = d.delta(z);
        bool ok = dz > 2.0 * spacing &&
                  (!(budget < kInf) ||
                   pair_lower_bound(x, dx, z, dz) + pair_lower_bound(y, dy, z, dz) <= budget);
        adm.emplace(key, ok ? 1 : -1);
        if (ok && ++admitted > max_nodes)
            throw ResolutionError("oracle: lattice node budget exceeded");
        return ok;
    };
    auto pos_of = [&](uint64_t key) {
        return x + Vec2{unpack_i(key) * spacing, unpack_j(key) * spacing};
    };

    using Item = std::pair<double, uint64_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;

    uint64_t src = pack_ij(0, 0);
    if (!admissible(src, x)) return {};
    dist_of[src] = 0.0;
    heap.push({0.0, src});

    LatticePath out;
    while (!heap.empty()) {
        auto [du, u] = heap.top();
        heap.pop();
        auto itu = dist_of.find(u);
        if (itu == dist_of.end() || du > itu->second) continue;
        if (u == kTargetKey) {
            out.found = true;
            out.distance = du;
            break;
        }
        Vec2 pu = pos_of(u);
        if (dist(pu, y) <= link_radius) {
            double w = grid_edge_weight(d, pu, y);
            if (w < kInf) {
                auto it = dist_of.find(kTargetKey);
                if (it == dist_of.end() || du + w < it->second) {
                    dist_of[kTargetKey] = du + w;
                    parent[kTargetKey] = u;
                    heap.push({du + w, kTargetKey});
                }
            }
        }
        int ui = unpack_i(u), uj = unpack_j(u);
        for (auto [di, dj] : grid_stencil()) {
            uint64_t v = pack_ij(ui + di, uj + dj);
            Vec2 pv = pos_of(v);
            if (!admissible(v, pv)) continue;
            double w = grid_edge_weight(d, pu, pv);
            if (!(w < kInf)) continue;
            auto it = dist_of.find(v);
            if (it == dist_of.end() || du + w < it->second) {
                dist_of[v] = du + w;
                parent[v] = u;
                heap.push({du + w, v});
            }
        }
    }
    if (!out.found) return out;

    std::vector<Vec2> rev;
    rev.push_back(y);
    uint64_t cur = parent[kTargetKey];
    while (cur != src) {
        rev.push_back(pos_of(cur));
        cur = parent[cur];
    }
    rev.push_back(x);
    out.vertices.assign(rev.rbegin(), rev.rend());
    return out;
}

double polyline_gauss_length(const VoronoiDomain& d, const std::vector<Vec2>& v) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < v.size(); ++i) total += grid_edge_weight(d, v[i], v[i + 1]);
    return total;
}

// Local straightening: each interior vertex slides along the perpendicular
// of its neighbor chord to minimize the two adjacent Gauss lengths. Vertices
// of one parity only read the other parity, so the update order inside a
// half-pass cannot matter and threaded runs reproduce serial ones exactly.
void smooth_lattice_path(const VoronoiDomain& d, std::vector<Vec2>& v, double spacing,
                         int max_passes, Exec exec) {
    if (v.size() < 3) return;
    const double span = 1.5 * spacing;
    const int n = int(v.size());
    double prev_total = polyline_gauss_length(d, v);
    for (int pass = 0; pass < max_passes; ++pass) {
        for (int parity = 1; parity >= 0; --parity) {
            const int threads = exec_threads(exec);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads) if (exec == Exec::openmp)
#endif
            for (int i = 1; i < n - 1; ++i) {
                if ((i & 1) != parity) continue;
                Vec2 a = v[i - 1], b = v[i], c = v[i + 1];
                Vec2 chord = c - a;
                double cl = norm(chord);
                if (cl < 1e-14) continue;
                Vec2 nrm = rot90(chord / cl);
                auto cost = [&](double s) {
                    Vec2 m = b + s * nrm;
                    return grid_edge_weight(d, a, m) + grid_edge_weight(d, m, c);
                };
                // golden-section on [-span, span]
                const double gr = 0.6180339887498949;
                double lo = -span, hi = span;
                double s1 = hi - gr * (hi - lo), s2 = lo + gr * (hi - lo);
                double f1 = cost(s1), f2 = cost(s2);
                for (int it = 0; it < 20; ++it) {
                    if (f1 <= f2) {
                        hi = s2; s2 = s1; f2 = f1;
                        s1 = hi - gr * (hi - lo); f1 = cost(s1);
                    } else {
                        lo = s1; s1 = s2; f1 = f2;
                        s2 = lo + gr * (hi - lo); f2 = cost(s2);
                    }
                }
                double best = f1 <= f2 ? s1 : s2;
                if (cost(best) < cost(0.0)) v[i] = b + best * nrm;
            }
#ifndef _OPENMP
            (void)threads;
#endif
        }
        double total = polyline_gauss_length(d, v);
        if (prev_total - total < 1e-7 * std::max(prev_total, 1e-12)) break;
        prev_total = total;
    }
}

} // namespace

double competitor_upper_bound(const VoronoiDomain& d, Vec2 x, Vec2 y) {
    auto leg = [&](Vec2 a, Vec2 b) {
        Polyline p;
        p.vertices = {a, b};
        p.closed = false;
        try {
            return qh_length_of_polyline(d, p, 1e-6);
        } catch (const std::domain_error&) {
            return kInf;
        }
    };
    // a straight segment grazing a nucleus is a valid but terrible bound, so
    // bent detours always compete
    double best = leg(x, y);
    Vec2 mid = 0.5 * (x + y);
    Vec2 nrm = norm(y - x) > 0 ? rot90(normalized(y - x)) : Vec2{1, 0};
    for (double f : {0.25, -0.25, 0.5, -0.5, 1.0, -1.0}) {
        Vec2 m = mid + f * dist(x, y) * nrm;
        best = std::min(best, leg(x, m) + leg(m, y));
    }
    return best;
}

OracleResult oracle_distance(const VoronoiDomain& d, Vec2 x, Vec2 y, double spacing,
                             const OracleParams& params) {
    if (!(spacing > 0.0) || !std::isfinite(spacing))
        throw InputError("oracle: spacing must be positive");
    if (!std::isfinite(x.x) || !std::isfinite(x.y) || !std::isfinite(y.x) || !std::isfinite(y.y))
        throw InputError("oracle: endpoints must be finite");
    if (d.delta(x) <= 2.0 * spacing || d.delta(y) <= 2.0 * spacing)
        throw ResolutionError("oracle: endpoint within the exclusion radius of a nucleus");

    OracleResult r;
    r.spacing_used = spacing;
    if (dist(x, y) <= 1e-12 * std::max(1.0, d.extent())) {
        r.path.vertices = {x, y};
        r.cum_qh = {0.0, 0.0};
        return r;
    }

    double own_budget = competitor_upper_bound(d, x, y);
    double budget = params.budget_hint > 0.0 ? std::min(params.budget_hint, own_budget)
                                             : own_budget;

    // The lower bound is exact along straight and radial geodesics, so the
    // corridor needs slack beyond the budget or it thins to measure zero.
    auto effective = [](double b) { return b < kInf ? 1.05 * b + 0.05 : kInf; };

    // A loose budget (a competitor segment grazing a nucleus) makes the
    // corridor balloon. A cheap coarse pass yields a near-optimal competitor
    // that tightens it before the fine lattices are expanded.
    double h0 = 4.0 * spacing;
    if (budget > 1.0 && d.delta(x) > 2.0 * h0 && d.delta(y) > 2.0 * h0) {
        try {
            auto pre = lattice_shortest_path(d, x, y, h0, effective(budget), params.max_nodes);
            if (pre.found) budget = std::min(budget, 1.02 * pre.distance + 0.05);
        } catch (const ResolutionError&) {
            // keep the original budget; the fine runs may still succeed
        }
    }
    auto run = [&](double h) {
        auto lp = lattice_shortest_path(d, x, y, h, effective(budget), params.max_nodes);
        if (!lp.found && budget < own_budget) {
            // the caller's hint cut the corridor; fall back to our own bound
            budget = own_budget;
            lp = lattice_shortest_path(d, x, y, h, effective(budget), params.max_nodes);
        }
        if (!lp.found)
            throw ResolutionError("oracle: endpoints not connected at this spacing");
        return lp;
    };

    auto coarse = run(spacing);
    auto fine = run(0.5 * spacing);
    r.distance = coarse.distance;

    smooth_lattice_path(d, coarse.vertices, spacing, params.smooth_passes, params.exec);
    smooth_lattice_path(d, fine.vertices, 0.5 * spacing, params.smooth_passes, params.exec);

    Polyline pc, pf;
    pc.vertices = coarse.vertices;
    pf.vertices = fine.vertices;
    double lc = qh_length_of_polyline(d, pc, 1e-9);
    double lf = qh_length_of_polyline(d, pf, 1e-9);
    r.richardson_estimate = (4.0 * lf - lc) / 3.0;

    r.path = pf;
    r.cum_qh.resize(pf.vertices.size(), 0.0);
    for (size_t i = 1; i < pf.vertices.size(); ++i) {
        Polyline seg;
        seg.vertices = {pf.vertices[i - 1], pf.vertices[i]};
        seg.closed = false;
        r.cum_qh[i] = r.cum_qh[i - 1] + qh_length_of_polyline(d, seg, 1e-9);
    }
    return r;
}

OracleResult oracle_distance(const VoronoiDomain& d, Vec2 x, Vec2 y, double spacing) {
    return oracle_distance(d, x, y, spacing, OracleParams{});
}

Vec2 oracle_seed_direction(const OracleResult& r, Vec2 x) {
    const auto& v = r.path.vertices;
    if (v.size() < 3) throw InputError("oracle: path too short for a direction fit");

    bool from_back = dist(v.back(), x) < dist(v.front(), x);
    double total = r.cum_qh.empty() ? 0.0 : r.cum_qh.back();
    auto vertex = [&](size_t k) { return from_back ? v[v.size() - 1 - k] : v[k]; };
    auto qh_at = [&](size_t k) {
        if (r.cum_qh.size() != v.size()) return 0.0;   // no lengths recorded
        return from_back ? total - r.cum_qh[v.size() - 1 - k] : r.cum_qh[k];
    };

    size_t count = 2;
    while (count < v.size() && qh_at(count) < 0.1) ++count;
    std::vector<Vec2> pts;
    for (size_t k = 0; k <= count && k < v.size(); ++k) pts.push_back(vertex(k));

    Vec2 fallback = pts[1] - pts[0];
    if (pts.size() < 3) {
        if (norm(fallback) == 0.0) throw InputError("oracle: degenerate path");
        return normalized(fallback);
    }
    Vec2 c{0, 0};
    for (const auto& p : pts) c = c + p;
    c = c / double(pts.size());
    double sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : pts) {
        Vec2 q = p - c;
        sxx += q.x * q.x;
        sxy += q.x * q.y;
        syy += q.y * q.y;
    }
    if (sxx + syy < 1e-30) {
        if (norm(fallback) == 0.0) throw InputError("oracle: degenerate path");
        return normalized(fallback);
    }
    Vec2 dir = unit_vec(0.5 * std::atan2(2.0 * sxy, sxx - syy));
    Vec2 span = pts.back() - pts.front();
    if (dot(dir, span) < 0.0) dir = -1.0 * dir;
    return dir;
}

} // namespace qhgeo
