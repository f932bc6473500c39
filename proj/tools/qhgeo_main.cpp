// command line surface: domain ingestion, distance / geodesic / ball queries,
// property-suite runner, polygon refinement ladders, oracle comparison.
// exit codes: 0 ok, 2 numeric failure, 3 input error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qhgeo/errors.hpp"
#include "qhgeo/geodesic.hpp"
#include "qhgeo/json_io.hpp"
#include "qhgeo/oracle.hpp"
#include "qhgeo/rng.hpp"
#include "qhgeo/svg.hpp"
#include "qhgeo/theorems.hpp"

using namespace qhgeo;

namespace {

Vec2 parse_vec2(const std::string& s) {
    double x, y;
    char tail;
    if (std::sscanf(s.c_str(), " %lf , %lf %c", &x, &y, &tail) != 2)
        throw InputError("expected a point as \"x,y\", got: " + s);
    if (!std::isfinite(x) || !std::isfinite(y))
        throw InputError("non-finite point: " + s);
    return {x, y};
}

ordered_json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file: " + path);
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open output file: " + path);
    out << bytes;
}

Exec parse_exec(const std::string& s) {
    if (s == "auto") return default_exec();
    if (s == "serial") return Exec::serial;
    if (s == "openmp") return Exec::openmp;
    throw InputError("unknown execution mode: " + s);
}

// engine vs grid oracle on one pair; oracle skipped for coincident points
struct Compared {
    double engine = 0.0;
    double oracle = 0.0;
    double rel_gap = 0.0;
};

Compared compare_pair(const VoronoiDomain& d, Vec2 x, Vec2 y, const ConnectResult& res) {
    Compared c;
    c.engine = res.distance;
    if (dist(x, y) == 0.0) return c;
    double spacing = std::min(d.delta(x), d.delta(y)) / 10.0;
    OracleParams op;
    op.budget_hint = 1.05 * c.engine + 0.05;
    auto orr = oracle_distance(d, x, y, spacing, op);
    c.oracle = orr.richardson_estimate;
    c.rel_gap = std::abs(c.engine - c.oracle) / std::max(c.engine, 1e-12);
    return c;
}

int run_distance(const std::string& input, const std::string& sx, const std::string& sy,
                 double tol, const std::string& output) {
    VoronoiDomain d = domain_from_json(load_json(input));
    Vec2 x = parse_vec2(sx), y = parse_vec2(sy);
    ConnectResult res;
    if (dist(x, y) == 0.0) {
        if (d.delta(x) <= 0.0) throw InputError("query point lies on the boundary set");
        res.distance = 0.0;
    } else {
        res = connect(d, x, y);
    }
    Compared c = compare_pair(d, x, y, res);
    std::printf("engine %.6f\n", c.engine);
    std::printf("oracle %.6f\n", c.oracle);
    std::printf("rel_gap %.3e\n", c.rel_gap);
    if (!output.empty()) write_file(output, connect_to_json(res).dump(2) + "\n");
    return c.rel_gap <= tol ? 0 : 2;
}

int run_geodesic(const std::string& input, const std::string& sx, const std::string& sy,
                 const std::string& output) {
    VoronoiDomain d = domain_from_json(load_json(input));
    Vec2 x = parse_vec2(sx), y = parse_vec2(sy);
    if (dist(x, y) == 0.0) throw InputError("geodesic query needs distinct endpoints");
    ConnectResult res = connect(d, x, y);
    std::printf("distance %.12f\n", res.distance);
    std::printf("paths %zu\n", res.paths.size());
    std::printf("unique %s\n", res.unique ? "true" : "false");
    if (!output.empty()) {
        if (output.size() > 4 && output.compare(output.size() - 4, 4, ".svg") == 0)
            write_file(output, render_svg(d, res.paths, std::vector<Polyline>{}));
        else
            write_file(output, connect_to_json(res).dump(2) + "\n");
    }
    return 0;
}

int run_ball(const std::string& input, const std::string& sx, double r, int n,
             const std::string& output, const std::string& exec_name) {
    if (n < 16) throw InputError("ball tracing needs at least 16 samples");
    if (!(r > 0.0)) throw InputError("ball radius must be positive");
    VoronoiDomain d = domain_from_json(load_json(input));
    Vec2 x = parse_vec2(sx);
    QhBall b = trace_ball(d, x, r, n, parse_exec(exec_name));
    Polyline boundary;
    boundary.closed = true;
    for (const auto& s : b.samples) boundary.vertices.push_back(s.endpoint);
    std::string csv = ball_to_csv(b);
    if (output.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        write_file(output + ".svg", render_svg(d, {}, {boundary}));
        write_file(output + ".csv", csv);
        std::printf("samples %zu\n", b.samples.size());
    }
    return 0;
}

std::vector<VerificationReport> run_suite(const std::string& suite, int trials,
                                          uint64_t seed, Exec exec) {
    std::vector<VerificationReport> out;
    auto algebraic = [&] {
        out.push_back(check_prop_curv(trials, 2, seed, exec));
        out.push_back(check_prop_curv(trials, 3, seed, exec));
        out.push_back(check_prop_curv(trials, 8, seed, exec));
        out.push_back(check_prop_distcurv(trials, seed, exec));
    };
    auto balls = [&] {
        out.push_back(check_prop_quasis(trials, seed, exec));
        out.push_back(check_smallballs(trials, seed, exec));
    };
    auto divergence = [&] {
        out.push_back(check_angle_divergence(trials, seed, exec));
        out.push_back(check_divergence_bound(trials, seed, exec));
        out.push_back(check_midpoint_bound(trials, seed, exec));
    };
    auto uniqueness = [&] { out.push_back(check_uniqueness_below_pi(trials, seed, exec)); };
    auto regularity = [&] { out.push_back(check_regularity(trials, seed, exec)); };
    if (suite == "algebraic") algebraic();
    else if (suite == "balls") balls();
    else if (suite == "divergence") divergence();
    else if (suite == "uniqueness") uniqueness();
    else if (suite == "regularity") regularity();
    else if (suite == "all") {
        algebraic();
        balls();
        divergence();
        uniqueness();
        regularity();
    } else {
        throw InputError("unknown suite: " + suite);
    }
    return out;
}

int run_verify(const std::string& suite, int trials, uint64_t seed,
               const std::string& output, const std::string& exec_name) {
    if (trials <= 0) throw InputError("trials must be positive");
    auto reports = run_suite(suite, trials, seed, parse_exec(exec_name));
    std::string csv = reports_to_csv(reports);
    std::fputs(csv.c_str(), stdout);
    if (!output.empty()) {
        ordered_json arr = ordered_json::array();
        for (const auto& r : reports) arr.push_back(report_to_json(r));
        write_file(output + ".json", arr.dump(2) + "\n");
        write_file(output + ".csv", csv);
    }
    for (const auto& r : reports)
        if (!r.passed()) return 2;
    return 0;
}

int run_approximate(const std::string& input, const std::string& sx, const std::string& sy,
                    const std::string& levels_arg, double tol, const std::string& output) {
    ordered_json j = load_json(input);
    if (!j.contains("polygon")) throw InputError("approximate needs a polygon domain spec");
    Polyline poly = polyline_from_json(j.at("polygon"));
    require_simple_polygon(poly);
    double spu = j.value("samples_per_unit", 1.0);
    if (!(spu > 0.0)) throw InputError("samples_per_unit must be positive");
    Vec2 x = parse_vec2(sx), y = parse_vec2(sy);
    if (winding_number(poly, x) == 0 || winding_number(poly, y) == 0)
        throw InputError("query points must lie inside the polygon");

    int lo = 0, hi = 4;
    if (!levels_arg.empty()) {
        char tail;
        if (std::sscanf(levels_arg.c_str(), " %d .. %d %c", &lo, &hi, &tail) == 2) {
        } else if (std::sscanf(levels_arg.c_str(), " %d %c", &lo, &tail) == 1) {
            hi = lo;
        } else {
            throw InputError("levels must be \"k\" or \"a..b\", got: " + levels_arg);
        }
    }
    if (lo < 0 || hi < lo || hi - lo > 12) throw InputError("bad level range");

    // boundary samples nest across levels, so the boundary only grows and
    // distances can only increase; the table flags drops beyond tol
    std::string csv = "level,nuclei,distance,change,flagged\n";
    double prev = 0.0;
    bool have_prev = false;
    for (int k = lo; k <= hi; ++k) {
        auto nuclei = sample_polygon(poly, spu, k);
        VoronoiDomain d = VoronoiDomain::build(nuclei);
        if (d.delta(x) <= 0.0 || d.delta(y) <= 0.0)
            throw InputError("query point collides with a boundary sample");
        double dist_k = qh_distance(d, x, y);
        double change = have_prev ? dist_k - prev : 0.0;
        bool flagged = have_prev && change < -tol;
        char row[160];
        std::snprintf(row, sizeof row, "%d,%zu,%.12f,%.12f,%d\n", k, nuclei.size(),
                      dist_k, change, flagged ? 1 : 0);
        csv += row;
        prev = dist_k;
        have_prev = true;
    }
    std::fputs(csv.c_str(), stdout);
    if (!output.empty()) write_file(output, csv);
    return 0;
}

int run_oracle_compare(const std::string& input, int trials, uint64_t seed, double tol,
                       const std::string& output) {
    if (trials <= 0) throw InputError("trials must be positive");
    VoronoiDomain d = domain_from_json(load_json(input));
    std::string csv = "trial,x0,x1,y0,y1,engine,oracle,rel_gap\n";
    double worst = 0.0;
    for (int i = 0; i < trials; ++i) {
        Rng rng = Rng::for_trial(seed, static_cast<uint64_t>(i));
        Vec2 x, y;
        for (int attempt = 0;; ++attempt) {
            x = random_point(d, rng);
            y = random_point(d, rng);
            if (competitor_upper_bound(d, x, y) <= 3.0) break;
            if (attempt > 200) throw ConvergenceError("no close pair found in the domain");
        }
        ConnectResult res = connect(d, x, y);
        Compared c = compare_pair(d, x, y, res);
        worst = std::max(worst, c.rel_gap);
        char row[240];
        std::snprintf(row, sizeof row, "%d,%.12f,%.12f,%.12f,%.12f,%.12f,%.12f,%.3e\n",
                      i, x.x, x.y, y.x, y.y, c.engine, c.oracle, c.rel_gap);
        csv += row;
    }
    std::fputs(csv.c_str(), stdout);
    std::printf("worst_rel_gap %.3e\n", worst);
    if (!output.empty()) write_file(output, csv);
    return worst <= tol ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact quasihyperbolic geometry on planar Voronoi domains"};
    app.require_subcommand(1);

    std::string input, output, sx, sy;
    std::string suite = "all", exec_name = "auto", levels;
    double tol = 0.02, radius = 0.0;
    int trials = 1000, samples = 64;
    uint64_t seed = 0;

    auto* cd = app.add_subcommand("distance", "two-point distance, checked against the grid oracle");
    cd->add_option("--input", input, "domain spec JSON")->required();
    cd->add_option("--x", sx, "first point \"x,y\"")->required();
    cd->add_option("--y", sy, "second point \"x,y\"")->required();
    cd->add_option("--tol", tol, "accepted engine/oracle relative gap");
    cd->add_option("--output", output, "write the minimizing paths as JSON");

    auto* cg = app.add_subcommand("geodesic", "minimizing paths between two points");
    cg->add_option("--input", input, "domain spec JSON")->required();
    cg->add_option("--x", sx, "first point \"x,y\"")->required();
    cg->add_option("--y", sy, "second point \"x,y\"")->required();
    cg->add_option("--output", output, "write paths as JSON, or SVG when the name ends in .svg");

    auto* cb = app.add_subcommand("ball", "trace a metric ball boundary");
    cb->add_option("--input", input, "domain spec JSON")->required();
    cb->add_option("--x", sx, "center \"x,y\"")->required();
    cb->add_option("--r", radius, "radius")->required();
    cb->add_option("--samples", samples, "boundary samples, at least 16");
    cb->add_option("--output", output, "base name; writes <base>.svg and <base>.csv");
    cb->add_option("--exec", exec_name, "serial | openmp | auto");

    auto* cv = app.add_subcommand("verify", "run property suites");
    cv->add_option("--suite", suite, "algebraic | balls | divergence | uniqueness | regularity | all");
    cv->add_option("--trials", trials, "trials per statement");
    cv->add_option("--seed", seed, "master seed")->required();
    cv->add_option("--output", output, "base name; writes <base>.json and <base>.csv");
    cv->add_option("--exec", exec_name, "serial | openmp | auto");

    auto* ca = app.add_subcommand("approximate", "polygon boundary refinement ladder");
    ca->add_option("--input", input, "polygon spec JSON")->required();
    ca->add_option("--x", sx, "first point \"x,y\"")->required();
    ca->add_option("--y", sy, "second point \"x,y\"")->required();
    ca->add_option("--levels", levels, "level range \"a..b\" (default 0..4)");
    ca->add_option("--tol", tol, "monotonicity slack")->default_val(1e-3);
    ca->add_option("--output", output, "write the table as CSV");

    auto* co = app.add_subcommand("oracle-compare", "engine vs oracle on random pairs");
    co->add_option("--input", input, "domain spec JSON")->required();
    co->add_option("--trials", trials, "number of pairs")->default_val(5);
    co->add_option("--seed", seed, "pair sampling seed");
    co->add_option("--tol", tol, "accepted relative gap");
    co->add_option("--output", output, "write the table as CSV");

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(cd)) return run_distance(input, sx, sy, tol, output);
        if (app.got_subcommand(cg)) return run_geodesic(input, sx, sy, output);
        if (app.got_subcommand(cb)) return run_ball(input, sx, radius, samples, output, exec_name);
        if (app.got_subcommand(cv)) return run_verify(suite, trials, seed, output, exec_name);
        if (app.got_subcommand(ca)) return run_approximate(input, sx, sy, levels, tol, output);
        if (app.got_subcommand(co)) return run_oracle_compare(input, trials, seed, tol, output);
        return 3;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 3;
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 3;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 2;
    }
}
