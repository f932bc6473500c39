#include "qhgeo/theorems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qhgeo/errors.hpp"
#include "qhgeo/spiral.hpp"

namespace qhgeo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TrialOut {
    double margin = 0.0;
    bool tested = false;
    bool failed = false;
};

// runs the per-trial body with counter-derived seeds and indexed writes, so
// serial and parallel execution reduce to identical reports
template <typename F>
VerificationReport sweep(const char* id, int trials, std::uint64_t seed, Exec exec,
                         const char* params, F&& body) {
    std::vector<TrialOut> out(std::max(trials, 0));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (exec == Exec::openmp)
#endif
    for (int i = 0; i < trials; ++i) {
        Rng rng = Rng::for_trial(seed, static_cast<std::uint64_t>(i));
        try {
            body(rng, out[i]);
        } catch (...) {
            out[i].tested = true;
            out[i].failed = true;
            out[i].margin = -kInf;
        }
    }
    (void)exec;
    VerificationReport rep;
    rep.statement_id = id;
    rep.trials = trials;
    int tested = 0;
    double worst = kInf;
    for (const TrialOut& t : out) {
        if (!t.tested) continue;
        ++tested;
        rep.failures += t.failed ? 1 : 0;
        worst = std::min(worst, t.margin);
    }
    rep.worst_margin = tested > 0 ? worst : 0.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "seed=%llu trials=%d tested=%d%s%s",
                  static_cast<unsigned long long>(seed), trials, tested,
                  params[0] ? " " : "", params);
    rep.config_digest = buf;
    return rep;
}

int nucleus_index(const VoronoiDomain& d, Vec2 s) {
    const auto& nuc = d.nuclei();
    int best = -1;
    double bd = kInf;
    for (size_t i = 0; i < nuc.size(); ++i) {
        double dd = dist(nuc[i], s);
        if (dd < bd) {
            bd = dd;
            best = static_cast<int>(i);
        }
    }
    return bd <= 1e-9 * std::max(1.0, d.extent()) ? best : -1;
}

int edge_between(const VoronoiDomain& d, int ca, int cb) {
    int lo = std::min(ca, cb), hi = std::max(ca, cb);
    for (size_t e = 0; e < d.edges().size(); ++e)
        if (d.edges()[e].cell_a == lo && d.edges()[e].cell_b == hi)
            return static_cast<int>(e);
    return -1;
}

struct Stint {
    int cell = -1;
    double t_in = 0.0, t_out = 0.0;
    double alpha = 0.0;
    int spirals = 0;
    int straights = 0;
};

// per-cell windows of a path: spiral pieces carry the cell, straight pieces
// extend the current window only when the path returns to the same cell
std::vector<Stint> stints_of(const VoronoiDomain& d, const GeodesicPath& g) {
    std::vector<Stint> st;
    double t = 0.0;
    int pending_straights = 0;  // straight run awaiting its next cell
    for (const PathPiece& pc : g.pieces) {
        double l = pc.len();
        if (pc.kind == PathPiece::Kind::spiral) {
            int cell = nucleus_index(d, pc.spiral.center);
            if (!st.empty() && st.back().cell == cell) {
                st.back().t_out = t + l;
                st.back().spirals += 1;
                st.back().straights += pending_straights;
            } else {
                Stint s;
                s.cell = cell;
                s.t_in = t;
                s.t_out = t + l;
                s.alpha = pc.spiral.alpha;
                s.spirals = 1;
                st.push_back(s);
            }
            pending_straights = 0;
        } else {
            pending_straights += 1;
        }
        t += l;
    }
    return st;
}

void nvec(Rng& rng, int dim, std::array<double, 8>& v) {
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (int k = 0; k < dim; ++k) {
            v[k] = rng.uniform(-1.0, 1.0);
            n2 += v[k] * v[k];
        }
    } while (n2 < 1e-6);
}

double norm_n(const std::array<double, 8>& v, int dim) {
    double n2 = 0.0;
    for (int k = 0; k < dim; ++k) n2 += v[k] * v[k];
    return std::sqrt(n2);
}

// a nearby shot pair from one start, with the second running left of the
// first; shrinks the angular offset until the endpoint gap target is met
struct NearbyPair {
    GeodesicPath a, b;
    double gap = 0.0;
    bool ok = false;
};

NearbyPair nearby_pair(const VoronoiDomain& d, Vec2 x, double phi, double r, double dphi0,
                       double gap_cap) {
    NearbyPair p;
    double dphi = dphi0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        p.a = shoot(d, x, unit_vec(phi), r);
        p.b = shoot(d, x, unit_vec(phi + dphi), r);
        p.gap = dist(p.a.end(), p.b.end());
        if (p.gap > 0.0 && p.gap <= gap_cap) {
            p.ok = true;
            break;
        }
        if (p.gap == 0.0) break;
        dphi /= 8.0;
    }
    if (!p.ok) return p;
    double ts = std::min(0.05, 0.5 * r);
    Vec2 v = p.b.point(ts) - p.a.point(ts);
    if (norm(v) == 0.0) {
        p.ok = false;
        return p;
    }
    if (cross(p.a.tangent(ts), v) < 0.0) std::swap(p.a, p.b);
    return p;
}

}  // namespace

VoronoiDomain random_domain(Rng& rng, int min_nuclei, int max_nuclei) {
    int n = rng.uniform_int(min_nuclei, max_nuclei);
    std::vector<Vec2> pts;
    pts.reserve(n);
    int guard = 0;
    while (static_cast<int>(pts.size()) < n) {
        if (++guard > 100000) throw ConvergenceError("random_domain: cannot place nuclei");
        Vec2 p{rng.uniform(), rng.uniform()};
        bool ok = true;
        for (const Vec2& q : pts)
            if (dist(p, q) < 0.02) {
                ok = false;
                break;
            }
        if (ok) pts.push_back(p);
    }
    return VoronoiDomain::build(pts);
}

Vec2 random_point(const VoronoiDomain& d, Rng& rng, double min_delta) {
    for (int it = 0; it < 100000; ++it) {
        Vec2 p{rng.uniform(-0.2, 1.2), rng.uniform(-0.2, 1.2)};
        if (d.delta(p) >= min_delta) return p;
    }
    throw ConvergenceError("random_point: no point with requested clearance");
}

CommonCellChain extract_chain(const VoronoiDomain& d, const GeodesicPath& a,
                              const GeodesicPath& b) {
    std::vector<Stint> sa = stints_of(d, a);
    std::vector<Stint> sb = stints_of(d, b);
    CommonCellChain chain;
    size_t n = std::min(sa.size(), sb.size());
    for (size_t i = 0; i < n; ++i) {
        if (sa[i].cell != sb[i].cell || sa[i].cell < 0) break;
        ChainCell c;
        c.cell = sa[i].cell;
        c.entry_edge = i == 0 ? -1 : edge_between(d, sa[i - 1].cell, sa[i].cell);
        c.t_in_a = sa[i].t_in;
        c.t_out_a = sa[i].t_out;
        c.t_in_b = sb[i].t_in;
        c.t_out_b = sb[i].t_out;
        c.logarithmic = sa[i].spirals == 1 && sa[i].straights == 0 && sb[i].spirals == 1 &&
                        sb[i].straights == 0;
        c.alpha_a = sa[i].alpha;
        c.alpha_b = sb[i].alpha;
        chain.cells.push_back(c);
    }
    return chain;
}

VerificationReport check_prop_curv(int trials, int dimension, std::uint64_t seed,
                                   Exec exec) {
    if (dimension != 2 && dimension != 3 && dimension != 8)
        throw InputError("check_prop_curv: dimension must be 2, 3 or 8");
    char params[32];
    std::snprintf(params, sizeof params, "dim=%d tol=1e-12", dimension);
    return sweep("prop_curv", trials, seed ^ (0x11u * dimension), exec, params,
                 [dimension](Rng& rng, TrialOut& t) {
                     std::array<double, 8> a{}, b{};
                     nvec(rng, dimension, a);
                     if (rng.uniform() < 0.3) {
                         // near-parallel pairs probe the equality case
                         double s = rng.uniform(0.1, 3.0);
                         for (int k = 0; k < dimension; ++k)
                             b[k] = s * a[k] + 1e-6 * rng.uniform(-1.0, 1.0);
                         if (norm_n(b, dimension) < 1e-6) b = a;
                     } else {
                         nvec(rng, dimension, b);
                     }
                     double na = norm_n(a, dimension), nb = norm_n(b, dimension);
                     std::array<double, 8> sum{};
                     double gap2 = 0.0;
                     for (int k = 0; k < dimension; ++k) {
                         sum[k] = a[k] + b[k];
                         double u = a[k] / na - b[k] / nb;
                         gap2 += u * u;
                     }
                     double lhs = na + nb - norm_n(sum, dimension);
                     double rhs = na * nb / (2.0 * (na + nb)) * gap2;
                     t.tested = true;
                     t.margin = lhs - rhs;
                     t.failed = t.margin < -1e-12;
                 });
}

VerificationReport check_prop_distcurv(int trials, std::uint64_t seed, Exec exec) {
    // one domain per block of 100 trials keeps generation cost sane at 1e5
    int blocks = (std::max(trials, 1) + 99) / 100;
    std::vector<VoronoiDomain> doms;
    doms.reserve(blocks);
    for (int bIdx = 0; bIdx < blocks; ++bIdx) {
        Rng rng = Rng::for_trial(seed ^ 0xd0a1ull, static_cast<std::uint64_t>(bIdx));
        doms.push_back(random_domain(rng));
    }
    return sweep("prop_distcurv", trials, seed, exec, "tol=1e-12 block=100",
                 [&doms](Rng& rng, TrialOut& t) {
                     int bIdx = rng.uniform_int(0, static_cast<int>(doms.size()) - 1);
                     const VoronoiDomain& d = doms[bIdx];
                     Vec2 x = random_point(d, rng, 1e-4);
                     double dx = d.delta(x);
                     double hl = dx * std::pow(10.0, rng.uniform(-6.0, 0.4));
                     Vec2 h = hl * unit_vec(rng.uniform(-kPi, kPi));
                     double lhs = d.delta(x + h) + d.delta(x - h);
                     double rhs = 2.0 * dx + norm2(h) / dx;
                     t.tested = true;
                     t.margin = rhs - lhs;
                     t.failed = t.margin < -1e-12;
                 });
}

VerificationReport check_prop_quasis(int trials, std::uint64_t seed, Exec exec) {
    return sweep("prop_quasis", trials, seed, exec, "r<=1/3 n=32", [](Rng& rng, TrialOut& t) {
        VoronoiDomain d = random_domain(rng, 3, 24);
        Vec2 x = random_point(d, rng);
        double r = rng.uniform(0.02, 1.0 / 3.0);
        QhBall ball = trace_ball(d, x, r, 32, Exec::serial);
        std::vector<Vec2> pts;
        pts.reserve(2 * ball.samples.size() + 1);
        pts.push_back(x);
        for (size_t k = 0; k < ball.samples.size(); ++k) {
            pts.push_back(ball.samples[k].endpoint);
            double u = (k % 7 + 1) / 8.0;
            pts.push_back(exp_map(d, x, ball.samples[k].phi, u * r));
        }
        double M = 0.0, m = kInf;
        for (Vec2 p : pts) {
            double dl = d.delta(p);
            M = std::max(M, dl);
            m = std::min(m, dl);
        }
        double margin = 2.0 - M / m;
        size_t half = ball.samples.size() / 2;
        for (size_t k = 0; k < half; ++k) {
            Vec2 mid = 0.5 * (ball.samples[k].endpoint + ball.samples[k + half].endpoint);
            double dm = d.delta(mid);
            margin = std::min(margin, dm - 0.5 * m);
            margin = std::min(margin, 2.0 * M - dm);
            if (dm <= 0.0) margin = -kInf;
        }
        t.tested = true;
        t.margin = margin;
        t.failed = margin < -1e-12;
    });
}

VerificationReport check_smallballs(int trials, std::uint64_t seed, Exec exec) {
    return sweep("smallballs", trials, seed, exec, "r=0.009 eps=1e-4",
                 [](Rng& rng, TrialOut& t) {
                     VoronoiDomain d = random_domain(rng, 3, 24);
                     Vec2 x = random_point(d, rng);
                     double r = 0.009;
                     QhBall ball = trace_ball(d, x, r, 32, Exec::serial);
                     double M = 0.0;
                     for (const auto& s : ball.samples) M = std::max(M, d.delta(s.endpoint));
                     int n = static_cast<int>(ball.samples.size());
                     int i = rng.uniform_int(0, n - 1);
                     int j = rng.uniform_int(0, n - 1);
                     Vec2 y = ball.samples[i].endpoint, z = ball.samples[j].endpoint;
                     Vec2 mid = 0.5 * (y + z);
                     double lhs = qh_distance(d, x, mid);
                     double rhs = r - norm2(y - z) / (512.0 * r * M * M) + 1e-4;
                     t.tested = true;
                     t.margin = rhs - lhs;
                     t.failed = t.margin < 0.0;
                 });
}

VerificationReport check_angle_divergence(int trials, std::uint64_t seed, Exec exec) {
    return sweep("angle_divergence", trials, seed, exec, "dphi<=1e-5 slack=1e-9",
                 [](Rng& rng, TrialOut& t) {
                     VoronoiDomain d = random_domain(rng, 3, 20);
                     std::vector<double> ds;
                     // redraw until the pair shares at least two purely
                     // logarithmic cells, else the claim is vacuous
                     for (int attempt = 0; attempt < 6 && ds.size() < 2; ++attempt) {
                         ds.clear();
                         Vec2 x = random_point(d, rng);
                         double phi = rng.uniform(-kPi, kPi);
                         double r = rng.uniform(0.5, 2.5);
                         double dphi = std::pow(10.0, rng.uniform(-7.0, -5.0));
                         NearbyPair p = nearby_pair(d, x, phi, r, dphi, kInf);
                         if (!p.ok) continue;
                         CommonCellChain chain = extract_chain(d, p.a, p.b);
                         for (const ChainCell& c : chain.cells)
                             if (c.logarithmic) ds.push_back(pr(c.alpha_a - c.alpha_b));
                     }
                     if (ds.size() < 2) return;
                     double big = 0.0;
                     for (double v : ds)
                         if (std::abs(v) > std::abs(big)) big = v;
                     double margin = kInf;
                     if (std::abs(big) > 1e-9) {
                         double s = big > 0.0 ? 1.0 : -1.0;
                         for (double v : ds) margin = std::min(margin, s * v + 1e-9);
                     } else {
                         margin = 1e-9;
                     }
                     for (size_t k = 0; k + 1 < ds.size(); ++k)
                         margin = std::min(margin,
                                           std::abs(ds[k + 1]) - std::abs(ds[k]) + 1e-9);
                     t.tested = true;
                     t.margin = margin;
                     t.failed = margin < 0.0;
                 });
}

VerificationReport check_divergence_bound(int trials, std::uint64_t seed, Exec exec) {
    return sweep("divergence_bound", trials, seed, exec, "gap<=1e-4*delta slack=1e-3",
                 [](Rng& rng, TrialOut& t) {
                     VoronoiDomain d = random_domain(rng, 3, 20);
                     Vec2 x = random_point(d, rng);
                     double phi = rng.uniform(-kPi, kPi);
                     double r = rng.uniform(0.3, 1.5);
                     NearbyPair p =
                         nearby_pair(d, x, phi, r, 5e-7, 1e-4 * d.delta(x));
                     if (!p.ok) return;
                     double worst = 0.0;
                     for (int k = 0; k <= 1000; ++k) {
                         double tt = r * k / 1000.0;
                         worst = std::max(worst, dist(p.a.point(tt), p.b.point(tt)));
                     }
                     double bound = 2.0 * std::exp(2.0 * r) * p.gap * (1.0 + 1e-3);
                     t.tested = true;
                     t.margin = bound - worst;
                     t.failed = t.margin < 0.0;
                 });
}

VerificationReport check_midpoint_bound(int trials, std::uint64_t seed, Exec exec) {
    return sweep("midpoint_bound", trials, seed, exec, "C=2e^{2r} slack=1e-6",
                 [](Rng& rng, TrialOut& t) {
                     VoronoiDomain d = random_domain(rng, 3, 20);
                     Vec2 x = random_point(d, rng);
                     double phi = rng.uniform(-kPi, kPi);
                     double r = rng.uniform(0.3, 1.2);
                     double C = 2.0 * std::exp(2.0 * r);
                     NearbyPair p =
                         nearby_pair(d, x, phi, r, 2e-7, 1e-4 * d.delta(x));
                     if (!p.ok) return;
                     double m = kInf;
                     Polyline avg;
                     const int steps = 512;
                     avg.vertices.reserve(steps + 1);
                     for (int k = 0; k <= steps; ++k) {
                         double tt = r * k / steps;
                         Vec2 pa = p.a.point(tt), pb = p.b.point(tt);
                         m = std::min({m, d.delta(pa), d.delta(pb)});
                         avg.vertices.push_back(0.5 * (pa + pb));
                     }
                     if (p.gap > m / C) return;
                     double len = qh_length_of_polyline(d, avg, 1e-7);
                     double bound = r + r * C * C * p.gap * p.gap / (m * m) + 1e-6;
                     double margin = bound - len;
                     Vec2 mid = 0.5 * (p.a.end() + p.b.end());
                     margin = std::min(margin, bound - qh_distance(d, x, mid));
                     t.tested = true;
                     t.margin = margin;
                     t.failed = margin < 0.0;
                 });
}

VerificationReport check_uniqueness_below_pi(int trials, std::uint64_t seed, Exec exec) {
    VerificationReport rep = sweep(
        "uniqueness_below_pi", trials, seed, exec, "cap=pi-0.05",
        [](Rng& rng, TrialOut& t) {
            VoronoiDomain d = random_domain(rng, 3, 20);
            Vec2 x = random_point(d, rng);
            double phi = rng.uniform(-kPi, kPi);
            double r = rng.uniform(0.15, kPi - 0.06);
            Vec2 y = exp_map(d, x, phi, r);
            ConnectResult res = connect(d, x, y);
            if (res.distance > kPi - 0.05) return;
            t.tested = true;
            t.margin = res.unique ? (kPi - 0.05) - res.distance : -1.0;
            t.failed = !res.unique;
        });
    // sharpness witness: the antipodal pair about one nucleus, found by the
    // general multi-start search itself
    VoronoiDomain d1 = VoronoiDomain::build({{0.0, 0.0}});
    ConnectOptions opts;
    opts.closed_forms = false;
    ConnectResult res = connect(d1, {1.0, 0.0}, {-1.0, 0.0}, opts);
    bool witness = !res.unique && res.paths.size() == 2 &&
                   std::abs(res.distance - kPi) <= 1e-6;
    rep.trials += 1;
    if (!witness) rep.failures += 1;
    rep.worst_margin = std::min(rep.worst_margin,
                                witness ? 1e-6 - std::abs(res.distance - kPi) : -1.0);
    rep.config_digest += " witness=antipodal";
    return rep;
}

VerificationReport check_regularity(int trials, std::uint64_t seed, Exec exec) {
    return sweep("regularity", trials, seed, exec, "r=2 speed_tol=1e-7",
                 [](Rng& rng, TrialOut& t) {
                     VoronoiDomain d = random_domain(rng, 3, 20);
                     Vec2 x = random_point(d, rng);
                     double r = 2.0;
                     GeodesicPath g = shoot(d, x, unit_vec(rng.uniform(-kPi, kPi)), r);
                     double margin = kInf;
                     // canonical speed by central differences clear of junctions
                     double h = 1e-7 * std::max(1.0, r);
                     std::vector<double> cuts;
                     double acc = 0.0;
                     for (const auto& pc : g.pieces) {
                         cuts.push_back(acc);
                         acc += pc.len();
                     }
                     cuts.push_back(acc);
                     for (int k = 0; k < 50; ++k) {
                         double tt = r * (k + 0.5) / 50.0;
                         bool near_cut = false;
                         for (double c : cuts)
                             if (std::abs(tt - c) < 4.0 * h) near_cut = true;
                         if (near_cut) continue;
                         double speed = dist(g.point(tt + h), g.point(tt - h)) / (2.0 * h);
                         double want = d.delta(g.point(tt));
                         margin = std::min(margin,
                                           1e-7 - std::abs(speed - want) / want);
                     }
                     // unit tangent is 1-Lipschitz in the parameter
                     const int ns = 100;
                     Vec2 prev = g.tangent(0.0);
                     for (int k = 1; k <= ns; ++k) {
                         double tt = r * k / ns;
                         Vec2 cur = g.tangent(tt);
                         double lhs = dist(cur, prev);
                         double rhs = (r / ns) * (1.0 + 1e-6) + 1e-12;
                         margin = std::min(margin, rhs - lhs);
                         prev = cur;
                     }
                     t.tested = true;
                     t.margin = margin;
                     t.failed = margin < 0.0;
                 });
}

double c_constant(double m, double r, double r_tilde) {
    if (!(m > 0.0) || !(r > 0.0) || !(r < r_tilde) || !(r_tilde < r + 1.0))
        throw std::domain_error("c_constant: need m > 0 and 0 < r < r~ < r + 1");
    double num = std::min(1.0, m * m * m) * (r_tilde - r);
    double den = 1e10 * std::max(1.0, 4.0 * std::exp(2.0 * r));
    return num / den;
}

std::vector<VerificationReport> verify_all(std::uint64_t seed, double scale, Exec exec) {
    if (!(scale >= 1e-3) || !std::isfinite(scale))
        throw InputError("verify_all: scale must be finite and >= 1e-3");
    auto n = [scale](int base) { return std::max(1, (int)std::lround(base * scale)); };
    std::vector<VerificationReport> reps;
    reps.push_back(check_prop_curv(n(100000), 2, seed, exec));
    reps.push_back(check_prop_curv(n(30000), 3, seed, exec));
    reps.push_back(check_prop_curv(n(30000), 8, seed, exec));
    reps.push_back(check_prop_distcurv(n(100000), seed, exec));
    reps.push_back(check_prop_quasis(n(1000), seed, exec));
    reps.push_back(check_smallballs(n(200), seed, exec));
    reps.push_back(check_angle_divergence(n(500), seed, exec));
    reps.push_back(check_divergence_bound(n(500), seed, exec));
    reps.push_back(check_midpoint_bound(n(200), seed, exec));
    reps.push_back(check_uniqueness_below_pi(n(300), seed, exec));
    reps.push_back(check_regularity(n(100), seed, exec));
    return reps;
}

std::string reports_to_csv(const std::vector<VerificationReport>& reports) {
    std::string s = "statement_id,trials,failures,worst_margin,config_digest\n";
    char buf[320];
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%s,%d,%d,%.17g,\"%s\"\n", r.statement_id.c_str(),
                      r.trials, r.failures, r.worst_margin, r.config_digest.c_str());
        s += buf;
    }
    return s;
}

}  // namespace qhgeo
