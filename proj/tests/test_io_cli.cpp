#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qhgeo/errors.hpp"
#include "qhgeo/geodesic.hpp"
#include "qhgeo/json_io.hpp"
#include "qhgeo/svg.hpp"
#include "qhgeo/theorems.hpp"

using namespace qhgeo;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    static fs::path p = [] {
        fs::path q = fs::temp_directory_path() / "qhgeo_io_cli";
        fs::create_directories(q);
        return q;
    }();
    return p;
}

void put_file(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << bytes;
}

std::string get_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// runs the installed binary through the shell; returns the exit code and
// captures stdout+stderr into `out`
int run_cli(const std::string& args, std::string* out = nullptr,
            const std::string& env_prefix = "") {
    fs::path cap = scratch() / "cli_capture.txt";
    std::string cmd = env_prefix + std::string(QHGEO_CLI_PATH) + " " + args + " > " +
                      cap.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    if (out) *out = get_file(cap);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

double seg_dist(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double t = dot(p - a, ab) / dot(ab, ab);
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, a + t * ab);
}

Polyline square() {
    Polyline p;
    p.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    p.closed = true;
    return p;
}

}  // namespace

TEST_CASE("domain json round trip keeps the nuclei") {
    auto d = VoronoiDomain::build({{0, 0}, {2, 0}, {1, 1.8}, {-0.5, 1.1}});
    auto j = domain_to_json(d);
    auto d2 = domain_from_json(j);
    REQUIRE(d2.nuclei().size() == d.nuclei().size());
    for (size_t i = 0; i < d.nuclei().size(); ++i)
        CHECK(dist(d.nuclei()[i], d2.nuclei()[i]) == 0.0);
    CHECK(d2.edges().size() == d.edges().size());
}

TEST_CASE("polygon domain spec samples the boundary") {
    ordered_json j;
    j["polygon"] = polyline_to_json(square());
    j["samples_per_unit"] = 4.0;
    auto d = domain_from_json(j);
    auto poly = square();
    CHECK(d.nuclei().size() == 16);
    for (const Vec2& p : d.nuclei()) {
        double best = 1e9;
        for (size_t i = 0; i < 4; ++i)
            best = std::min(best,
                            seg_dist(p, poly.vertices[i], poly.vertices[(i + 1) % 4]));
        CHECK(best <= 1e-12);
    }
}

TEST_CASE("polygon sampling spacing stays below the requested pitch") {
    Polyline tri;
    tri.vertices = {{0, 0}, {1.37, 0.21}, {0.4, 1.9}};
    tri.closed = true;
    for (double spu : {1.0, 3.7, 11.0}) {
        auto pts = sample_polygon(tri, spu);
        REQUIRE(pts.size() >= 3);
        for (size_t i = 0; i < pts.size(); ++i)
            CHECK(dist(pts[i], pts[(i + 1) % pts.size()]) <= 1.0 / spu + 1e-12);
    }
}

TEST_CASE("polygon sampling nests across levels") {
    Polyline tri;
    tri.vertices = {{0, 0}, {1.37, 0.21}, {0.4, 1.9}};
    tri.closed = true;
    auto lo = sample_polygon(tri, 2.0, 1);
    auto hi = sample_polygon(tri, 2.0, 2);
    CHECK(hi.size() == 2 * lo.size());
    for (const Vec2& p : lo) {
        bool found = false;
        for (const Vec2& q : hi)
            if (q.x == p.x && q.y == p.y) {
                found = true;
                break;
            }
        CHECK(found);
    }
}

TEST_CASE("simple polygon validation rejects bad loops") {
    CHECK_NOTHROW(require_simple_polygon(square()));

    Polyline open = square();
    open.closed = false;
    CHECK_THROWS_AS(require_simple_polygon(open), InputError);

    Polyline two;
    two.vertices = {{0, 0}, {1, 0}};
    two.closed = true;
    CHECK_THROWS_AS(require_simple_polygon(two), InputError);

    Polyline repeat;
    repeat.vertices = {{0, 0}, {1, 0}, {1, 0}, {0, 1}};
    repeat.closed = true;
    CHECK_THROWS_AS(require_simple_polygon(repeat), InputError);

    Polyline bowtie;
    bowtie.vertices = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    bowtie.closed = true;
    CHECK_THROWS_AS(require_simple_polygon(bowtie), InputError);
}

TEST_CASE("path json round trip reproduces pieces, events and geometry") {
    auto d = VoronoiDomain::build({{0, 0}, {2, 0}, {1, 1.8}});
    // endpoints in different cells force at least one crossing event
    auto res = connect(d, {0.4, 0.3}, {1.6, 0.35});
    REQUIRE(!res.paths.empty());
    GeodesicPath g = res.paths[0];
    REQUIRE(g.pieces.size() >= 2);
    auto j = path_to_json(g);
    GeodesicPath h = path_from_json(j);
    REQUIRE(h.pieces.size() == g.pieces.size());
    REQUIRE(h.events.size() == g.events.size());
    CHECK(h.total_qh_len == g.total_qh_len);
    CHECK(dist(h.start, g.start) == 0.0);
    for (size_t i = 0; i < g.pieces.size(); ++i) {
        CHECK(h.pieces[i].kind == g.pieces[i].kind);
        CHECK(h.pieces[i].len() == g.pieces[i].len());
        CHECK(dist(h.pieces[i].start(), g.pieces[i].start()) == 0.0);
        CHECK(dist(h.pieces[i].end(), g.pieces[i].end()) == 0.0);
    }
    for (size_t i = 0; i < g.events.size(); ++i) {
        CHECK(h.events[i].t == g.events[i].t);
        CHECK(h.events[i].kind == g.events[i].kind);
        CHECK(h.events[i].cell_from == g.events[i].cell_from);
        CHECK(h.events[i].cell_to == g.events[i].cell_to);
    }
    // serialized form is stable under a parse/dump cycle
    CHECK(ordered_json::parse(j.dump()).dump() == j.dump());
}

TEST_CASE("connect json carries distance, uniqueness and all paths") {
    auto d = VoronoiDomain::build({{0, -1}, {0, 1}});
    auto res = connect(d, {-1.5, 0.3}, {1.2, -0.2});
    auto j = connect_to_json(res);
    CHECK(j.at("distance").get<double>() == res.distance);
    CHECK(j.at("unique").get<bool>() == res.unique);
    REQUIRE(j.at("paths").size() == res.paths.size());
    GeodesicPath back = path_from_json(j.at("paths").at(0));
    CHECK(dist(back.end(), res.paths[0].end()) == 0.0);
}

TEST_CASE("report json mirrors the verification report") {
    auto r = check_prop_curv(50, 2, 99);
    auto j = report_to_json(r);
    CHECK(j.at("statement_id").get<std::string>() == r.statement_id);
    CHECK(j.at("trials").get<int>() == r.trials);
    CHECK(j.at("failures").get<int>() == r.failures);
    CHECK(j.at("worst_margin").get<double>() == r.worst_margin);
    CHECK(j.at("passed").get<bool>() == r.passed());
}

TEST_CASE("polyline csv holds every vertex at full precision") {
    Polyline p;
    p.vertices = {{0.1, -2.0 / 3.0}, {std::sqrt(2.0), 1e-17}};
    std::string csv = to_csv(p);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y");
    for (const Vec2& v : p.vertices) {
        REQUIRE(std::getline(in, line));
        double a, b;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &a, &b) == 2);
        CHECK(a == v.x);
        CHECK(b == v.y);
    }
}

TEST_CASE("ball csv lists one row per sample ordered by angle") {
    auto d = VoronoiDomain::build({{0, 0}});
    auto b = trace_ball(d, {1, 0}, 0.4, 32);
    std::string csv = ball_to_csv(b);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "phi,x,y");
    size_t rows = 0;
    double prev = -1e9;
    while (std::getline(in, line)) {
        double phi, x, y;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &phi, &x, &y) == 3);
        CHECK(phi >= prev);
        prev = phi;
        ++rows;
    }
    CHECK(rows == b.samples.size());
}

TEST_CASE("svg bytes are fixed for a fixed scene") {
    auto d = VoronoiDomain::build({{0, 0}});
    Polyline diamond;
    diamond.vertices = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    diamond.closed = true;
    std::string svg = render_svg(d, {}, {diamond});
    std::string expected =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 2200.000 2200.000\">\n"
        "<g id=\"edges\" stroke=\"#999999\" stroke-width=\"2\" fill=\"none\">\n"
        "</g>\n"
        "<g id=\"nuclei\" fill=\"#000000\">\n"
        "<circle cx=\"1100.000\" cy=\"1100.000\" r=\"5\"/>\n"
        "</g>\n"
        "<g id=\"paths\">\n"
        "</g>\n"
        "<g id=\"polylines\">\n"
        "<polyline fill=\"none\" stroke-width=\"3\" stroke=\"#d62728\" points=\""
        "2100.000,1100.000 1100.000,100.000 100.000,1100.000 1100.000,2100.000 "
        "2100.000,1100.000\"/>\n"
        "</g>\n"
        "</svg>\n";
    CHECK(svg == expected);
    CHECK(render_svg(d, {}, {diamond}) == svg);
}

TEST_CASE("svg sampling of geodesics is dense and endpoint-exact") {
    auto d = VoronoiDomain::build({{0, -1}, {0, 1}});
    auto res = connect(d, {-1.5, 0.3}, {1.2, -0.2});
    REQUIRE(res.paths.size() == 1);
    Polyline pl = sample_path(res.paths[0], 128);
    REQUIRE(pl.vertices.size() == 129);
    CHECK(dist(pl.vertices.front(), res.paths[0].point(0.0)) == 0.0);
    CHECK(dist(pl.vertices.back(), res.paths[0].end()) == 0.0);
    std::string svg = render_svg(d, res.paths, std::vector<Polyline>{});
    CHECK(svg.find("<g id=\"edges\"") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(render_svg(d, res.paths, std::vector<Polyline>{}) == svg);
    CHECK_THROWS_AS(sample_path(res.paths[0], 1), InputError);
}

TEST_CASE("cli distance agrees with the closed form and handles x == y") {
    fs::path dom = scratch() / "dom_single.json";
    put_file(dom, "{\"nuclei\": [[0,0]]}\n");
    std::string out;
    int rc = run_cli("distance --input " + dom.string() +
                         " --x 1,0 --y 2.718281828459045,0",
                     &out);
    CHECK(rc == 0);
    CHECK(out.find("engine 1.000000") != std::string::npos);
    CHECK(out.find("oracle 1.000") != std::string::npos);

    rc = run_cli("distance --input " + dom.string() + " --x 1,0 --y 1,0", &out);
    CHECK(rc == 0);
    CHECK(out.find("engine 0.000000") != std::string::npos);
}

TEST_CASE("cli distance writes the minimizing path as json") {
    fs::path dom = scratch() / "dom_pair.json";
    put_file(dom, "{\"nuclei\": [[0,-1],[0,1]]}\n");
    fs::path outp = scratch() / "path_out.json";
    int rc = run_cli("distance --input " + dom.string() +
                     " --x -1.5,0.3 --y 1.2,-0.2 --output " + outp.string());
    CHECK(rc == 0);
    auto j = ordered_json::parse(get_file(outp));
    auto d = VoronoiDomain::build({{0, -1}, {0, 1}});
    GeodesicPath g = path_from_json(j.at("paths").at(0));
    CHECK(dist(g.end(), {1.2, -0.2}) <= 1e-8 * d.delta({1.2, -0.2}));
    CHECK(j.at("distance").get<double>() == doctest::Approx(g.total_qh_len));
}

TEST_CASE("cli rejects malformed input with exit code 3") {
    fs::path bad = scratch() / "bad.json";
    put_file(bad, "{\"nuclei\": [[0,0]");
    std::string out;
    CHECK(run_cli("distance --input " + bad.string() + " --x 1,0 --y 2,0", &out) == 3);
    CHECK(out.find("input error") != std::string::npos);

    fs::path dom = scratch() / "dom_s.json";
    put_file(dom, "{\"nuclei\": [[0,0]]}\n");
    CHECK(run_cli("distance --input " + dom.string() + " --x \"1;0\" --y 2,0") == 3);
    CHECK(run_cli("distance --input " + scratch().string() + "/missing.json --x 1,0 --y 2,0") == 3);
    CHECK(run_cli("distance --input " + dom.string() + " --x 0,0 --y 2,0") == 3);
    CHECK(run_cli("ball --input " + dom.string() + " --x 1,0 --r 0.5 --samples 8") == 3);
    CHECK(run_cli("ball --input " + dom.string() + " --x 1,0 --r -1 --samples 32") == 3);
    CHECK(run_cli("verify --suite nonexistent --seed 7") == 3);
    CHECK(run_cli("verify --suite all --trials 5") == 3);  // seed is mandatory
    CHECK(run_cli("nonsense") == 3);
}

TEST_CASE("cli ball emits svg plus csv and honors the sample floor") {
    fs::path dom = scratch() / "dom_ball.json";
    put_file(dom, "{\"nuclei\": [[0,0]]}\n");
    fs::path base = scratch() / "ball_run";
    int rc = run_cli("ball --input " + dom.string() + " --x 1,0 --r 0.5 --samples 64 --output " +
                     base.string());
    CHECK(rc == 0);
    std::string svg = get_file(base.string() + ".svg");
    std::string csv = get_file(base.string() + ".csv");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("id=\"polylines\"") != std::string::npos);
    CHECK(csv.rfind("phi,x,y", 0) == 0);

    // boundary samples satisfy the punctured-plane closed form
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        double phi, x, y;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &phi, &x, &y) == 3);
        double rr = std::hypot(x, y);
        double closed_form = std::hypot(std::log(rr), std::atan2(y, x));
        CHECK(closed_form == doctest::Approx(0.5).epsilon(1e-8));
        ++rows;
    }
    CHECK(rows >= 64);

    // reruns are byte-identical
    fs::path base2 = scratch() / "ball_run2";
    run_cli("ball --input " + dom.string() + " --x 1,0 --r 0.5 --samples 64 --output " +
            base2.string());
    CHECK(get_file(base2.string() + ".svg") == svg);
    CHECK(get_file(base2.string() + ".csv") == csv);
}

TEST_CASE("cli verify reports are deterministic across runs and exec modes") {
    fs::path a = scratch() / "ver_a", b = scratch() / "ver_b", c = scratch() / "ver_c";
    std::string out_a, out_b, out_c;
    int rc = run_cli("verify --suite balls --trials 12 --seed 3 --exec serial --output " +
                         a.string(),
                     &out_a);
    CHECK(rc == 0);
    CHECK(run_cli("verify --suite balls --trials 12 --seed 3 --exec serial --output " +
                      b.string(),
                  &out_b) == 0);
    CHECK(run_cli("verify --suite balls --trials 12 --seed 3 --exec openmp --output " +
                      c.string(),
                  &out_c, "OMP_NUM_THREADS=3 ") == 0);
    CHECK(out_a == out_b);
    CHECK(out_a == out_c);
    CHECK(get_file(a.string() + ".csv") == get_file(b.string() + ".csv"));
    CHECK(get_file(a.string() + ".json") == get_file(b.string() + ".json"));
    CHECK(get_file(a.string() + ".csv") == get_file(c.string() + ".csv"));
    CHECK(get_file(a.string() + ".json") == get_file(c.string() + ".json"));
    CHECK(out_a.rfind("statement_id,trials,failures,worst_margin,config_digest", 0) == 0);

    auto arr = ordered_json::parse(get_file(a.string() + ".json"));
    REQUIRE(arr.is_array());
    REQUIRE(arr.size() == 2);
    for (const auto& rep : arr) CHECK(rep.at("passed").get<bool>());
}

TEST_CASE("cli approximate emits a nested refinement ladder") {
    fs::path spec = scratch() / "poly_spec.json";
    ordered_json j;
    j["polygon"] = polyline_to_json(square());
    j["samples_per_unit"] = 4.0;
    put_file(spec, j.dump() + "\n");
    std::string out;
    int rc = run_cli("approximate --input " + spec.string() +
                         " --x 0.5,0.5 --y 0.6,0.5 --levels 0..4",
                     &out);
    CHECK(rc == 0);
    std::istringstream in(out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "level,nuclei,distance,change,flagged");
    int level, nuclei, flagged, rows = 0;
    double distv, change, prev = -1.0, last = 0.0;
    while (std::getline(in, line)) {
        REQUIRE(std::sscanf(line.c_str(), "%d,%d,%lf,%lf,%d", &level, &nuclei, &distv,
                            &change, &flagged) == 5);
        CHECK(level == rows);
        CHECK(nuclei == 16 << rows);
        CHECK(distv >= prev - 1e-9);  // nested boundaries only grow the metric
        CHECK(flagged == 0);
        prev = distv;
        last = distv;
        ++rows;
    }
    CHECK(rows == 5);
    // the square's midline distance has the one-coordinate closed form
    CHECK(last == doctest::Approx(std::log(1.25)).epsilon(1e-3));

    // query point outside the polygon is an input error
    CHECK(run_cli("approximate --input " + spec.string() + " --x 2,0.5 --y 0.6,0.5") == 3);
    // non-simple polygon is an input error
    ordered_json bow;
    Polyline bowtie;
    bowtie.vertices = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    bowtie.closed = true;
    bow["polygon"] = polyline_to_json(bowtie);
    bow["samples_per_unit"] = 4.0;
    fs::path bspec = scratch() / "poly_bow.json";
    put_file(bspec, bow.dump() + "\n");
    CHECK(run_cli("approximate --input " + bspec.string() + " --x 0.5,0.45 --y 0.6,0.45") == 3);
}

TEST_CASE("coarsest polygon level equals the direct nucleus domain") {
    Polyline sq = square();
    auto pts = sample_polygon(sq, 0.25);  // one sample per unit edge: the corners
    REQUIRE(pts.size() == 4);
    auto dk = VoronoiDomain::build(pts);
    auto dd = VoronoiDomain::build({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    Vec2 x{0.5, 0.45}, y{0.62, 0.5};
    CHECK(qh_distance(dk, x, y) == doctest::Approx(qh_distance(dd, x, y)).epsilon(1e-12));
}

TEST_CASE("cli geodesic writes svg on request") {
    fs::path dom = scratch() / "dom_geo.json";
    put_file(dom, "{\"nuclei\": [[0,-1],[0,1]]}\n");
    fs::path svg = scratch() / "geo_out.svg";
    std::string out;
    int rc = run_cli("geodesic --input " + dom.string() + " --x -2,0.05 --y 2,0.05 --output " +
                         svg.string(),
                     &out);
    CHECK(rc == 0);
    CHECK(out.find("unique true") != std::string::npos);
    std::string bytes = get_file(svg);
    CHECK(bytes.rfind("<svg", 0) == 0);
    CHECK(bytes.find("id=\"paths\"") != std::string::npos);
}

TEST_CASE("cli oracle-compare stays inside the regression tolerance") {
    fs::path dom = scratch() / "dom_oc.json";
    put_file(dom, "{\"nuclei\": [[0,-1],[0,1],[1.4,0.2]]}\n");
    std::string out;
    int rc = run_cli("oracle-compare --input " + dom.string() + " --trials 4 --seed 11", &out);
    CHECK(rc == 0);
    CHECK(out.find("worst_rel_gap") != std::string::npos);
    CHECK(out.rfind("trial,x0,x1,y0,y1,engine,oracle,rel_gap", 0) == 0);
}
