#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qhgeo/geodesic.hpp"
#include "qhgeo/parallel.hpp"
#include "qhgeo/rng.hpp"
#include "qhgeo/voronoi.hpp"

namespace qhgeo {

// outcome of one property sweep; reproducible bit for bit from the digest
struct VerificationReport {
    std::string statement_id;
    int trials = 0;
    int failures = 0;
    // signed slack, min over tested trials: bound minus observed value,
    // positive = inequality satisfied with room to spare
    double worst_margin = 0.0;
    std::string config_digest;  // seed, counts and tolerances that produced this
    bool passed() const { return failures == 0; }
};

// shared random instance generators (all sweeps draw from these)
VoronoiDomain random_domain(Rng& rng, int min_nuclei = 3, int max_nuclei = 50);
Vec2 random_point(const VoronoiDomain& d, Rng& rng, double min_delta = 0.05);

// window of one cell shared by two paths started at the same point
struct ChainCell {
    int cell = -1;
    int entry_edge = -1;          // edge crossed entering this cell; -1 for the first
    double t_in_a = 0.0, t_out_a = 0.0;   // first path's parameter window
    double t_in_b = 0.0, t_out_b = 0.0;   // second path's window
    double alpha_a = 0.0, alpha_b = 0.0;  // spiral angles, valid when logarithmic
    bool logarithmic = false;     // both windows are single spiral pieces
};

// maximal common prefix, by visited cell, of two paths from one start point;
// empty when they part immediately, partial when they part later
struct CommonCellChain {
    std::vector<ChainCell> cells;
};

CommonCellChain extract_chain(const VoronoiDomain& d, const GeodesicPath& a,
                              const GeodesicPath& b);

// |a|+|b|-|a+b| >= |a||b|/(2(|a|+|b|)) * |a/|a| - b/|b||^2 on random nonzero
// vector pairs; dimension 2, 3 or 8
VerificationReport check_prop_curv(int trials, int dimension, std::uint64_t seed,
                                   Exec exec = default_exec());

// delta(x+h) + delta(x-h) <= 2 delta(x) + |h|^2 / delta(x)
VerificationReport check_prop_distcurv(int trials, std::uint64_t seed,
                                       Exec exec = default_exec());

// over sampled balls of radius <= 1/3: sup delta / inf delta <= 2, and chord
// midpoints stay in the domain with m/2 <= delta(mid) <= 2M
VerificationReport check_prop_quasis(int trials, std::uint64_t seed,
                                     Exec exec = default_exec());

// balls of radius 0.009: distance from the center to a chord midpoint is at
// most r - |y-z|^2 / (512 r M^2), within the numeric budget 1e-4
VerificationReport check_smallballs(int trials, std::uint64_t seed,
                                    Exec exec = default_exec());

// along common chains of nearby shot pairs, the principal angle difference
// keeps one sign and grows in magnitude cell by cell (1e-9 slack)
VerificationReport check_angle_divergence(int trials, std::uint64_t seed,
                                          Exec exec = default_exec());

// nearby geodesics with endpoint gap <= 1e-4 delta(x) stay within
// 2 e^{2r} |y-z| (1+1e-3) of each other at every parameter
VerificationReport check_divergence_bound(int trials, std::uint64_t seed,
                                          Exec exec = default_exec());

// the pointwise average of a nearby pair has quasihyperbolic length at most
// r + r C^2 |y-z|^2 / m^2 with C = 2 e^{2r}, and the chord midpoint is at
// distance at most that from the start
VerificationReport check_midpoint_bound(int trials, std::uint64_t seed,
                                        Exec exec = default_exec());

// pairs at distance <= pi - 0.05 have a unique geodesic; the antipodal
// single-nucleus pair at distance pi yields exactly two (found by the same
// multi-start search, closed forms disabled)
VerificationReport check_uniqueness_below_pi(int trials, std::uint64_t seed,
                                             Exec exec = default_exec());

// canonical speed |gamma'| = delta(gamma) by finite differences, and the
// 1-Lipschitz bound on the unit tangent, along random shots
VerificationReport check_regularity(int trials, std::uint64_t seed,
                                    Exec exec = default_exec());

// min{1, m^3} (r~ - r) / (10^10 max{1, 4 e^{2r}}); requires 0 < r < r~ < r+1
double c_constant(double m, double r, double r_tilde);

// every sweep above, fixed order, trial counts scaled by `scale` (>= 1e-3)
std::vector<VerificationReport> verify_all(std::uint64_t seed, double scale = 1.0,
                                           Exec exec = default_exec());

// aggregate table: statement_id, trials, failures, worst_margin, config_digest
std::string reports_to_csv(const std::vector<VerificationReport>& reports);

}  // namespace qhgeo
