#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <set>

#include "qhgeo/errors.hpp"
#include "qhgeo/rng.hpp"
#include "qhgeo/voronoi.hpp"

using namespace qhgeo;

TEST_CASE("single nucleus: one unbounded cell, no edges") {
    auto dom = VoronoiDomain::build({{2, -3}});
    CHECK(dom.cells().size() == 1);
    CHECK(dom.edges().empty());
    CHECK(dom.corners().empty());
    CHECK_FALSE(dom.cells()[0].bounded);
    CHECK(dom.delta({2, 1}) == doctest::Approx(4.0));
    CHECK(dom.nearest_nucleus({100, 0}) == 0);
    auto loc = dom.locate({5, 5});
    CHECK(loc.kind == CellLocation::Kind::interior);
    CHECK(loc.cell == 0);
}

TEST_CASE("two nuclei: one full-line edge on the bisector") {
    auto dom = VoronoiDomain::build({{0, 1}, {0, -1}});
    REQUIRE(dom.edges().size() == 1);
    const auto& e = dom.edges()[0];
    CHECK(e.point.x == doctest::Approx(0.0));
    CHECK(e.point.y == doctest::Approx(0.0));
    CHECK(std::abs(e.dir.y) <= 1e-15);
    CHECK(e.h == doctest::Approx(1.0));
    CHECK(std::isinf(e.lo));
    CHECK(std::isinf(e.hi));
    CHECK(e.cell_a == 0);
    CHECK(e.cell_b == 1);
    CHECK(dom.corners().empty());
    CHECK_FALSE(dom.cells()[0].bounded);

    // nuclei got sorted lexicographically: cell 0 is (0,-1)
    CHECK(dom.nuclei()[0].y == doctest::Approx(-1.0));
    CHECK(norm(dom.mirror_nucleus(0, 0) - dom.nuclei()[1]) <= 1e-14);
    CHECK(norm(dom.mirror_nucleus(0, 1) - dom.nuclei()[0]) <= 1e-14);
    CHECK_THROWS_AS(dom.mirror_nucleus(0, 2), std::logic_error);

    auto on = dom.locate({3.5, 0});
    CHECK(on.kind == CellLocation::Kind::edge);
    CHECK(on.edge == 0);
    auto in = dom.locate({3.5, 0.2});
    CHECK(in.kind == CellLocation::Kind::interior);
    CHECK(dom.nuclei()[in.cell].y == doctest::Approx(1.0));
}

TEST_CASE("equilateral triangle: three edges meet at the circumcenter") {
    double r = 2.0;
    std::vector<Vec2> pts;
    for (int k = 0; k < 3; ++k)
        pts.push_back(r * unit_vec(kPi / 2 + kTwoPi * k / 3));
    auto dom = VoronoiDomain::build(pts);
    CHECK(dom.edges().size() == 3);
    REQUIRE(dom.corners().size() == 1);
    const auto& c = dom.corners()[0];
    CHECK(norm(c.position) <= 1e-12);
    CHECK(c.edges.size() == 3);
    CHECK(c.cells.size() == 3);

    // every surviving edge point is equidistant to its two cells and no
    // closer to the third
    for (const auto& e : dom.edges()) {
        double lo = std::max(e.lo, -3.0), hi = std::min(e.hi, 3.0);
        for (int k = 0; k <= 10; ++k) {
            Vec2 z = e.point + e.dir * (lo + (hi - lo) * k / 10.0);
            double da = dist(z, dom.nuclei()[e.cell_a]);
            double db = dist(z, dom.nuclei()[e.cell_b]);
            CHECK(da == doctest::Approx(db).epsilon(1e-12));
            CHECK(dom.delta(z) == doctest::Approx(da).epsilon(1e-12));
        }
    }
}

TEST_CASE("collinear nuclei: parallel strip edges, no corners") {
    auto dom = VoronoiDomain::build({{0, 0}, {1, 0}, {2.5, 0}});
    CHECK(dom.edges().size() == 2);
    CHECK(dom.corners().empty());
    for (const auto& e : dom.edges()) {
        CHECK(std::isinf(e.lo));
        CHECK(std::isinf(e.hi));
        CHECK(std::abs(e.dir.x) <= 1e-15);
    }
    auto loc = dom.locate({0.5, 7.0});
    CHECK(loc.kind == CellLocation::Kind::edge);
}

TEST_CASE("cocircular square: four edges, one corner, degenerate edge dropped") {
    auto dom = VoronoiDomain::build({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}});
    // the diagonal pairs are cocircular: their mutual bisector degenerates
    // to the single point at the center and must not survive as an edge
    CHECK(dom.edges().size() == 4);
    REQUIRE(dom.corners().size() == 1);
    CHECK(dom.corners()[0].edges.size() == 4);
    CHECK(dom.corners()[0].cells.size() == 4);
    CHECK(norm(dom.corners()[0].position) <= 1e-12);
    auto loc = dom.locate({0, 0});
    CHECK(loc.kind == CellLocation::Kind::corner);
    CHECK(loc.corner == 0);
}

TEST_CASE("interior grid cell of a 3x3 lattice is bounded") {
    std::vector<Vec2> pts;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            pts.push_back({double(i), double(j)});
    auto dom = VoronoiDomain::build(pts);
    int bounded = 0, center = -1;
    for (size_t i = 0; i < dom.cells().size(); ++i) {
        if (dom.cells()[i].bounded) { ++bounded; center = int(i); }
    }
    CHECK(bounded == 1);
    REQUIRE(center >= 0);
    CHECK(dom.nuclei()[center].x == doctest::Approx(1.0));
    CHECK(dom.nuclei()[center].y == doctest::Approx(1.0));
    CHECK(dom.cells()[center].edges.size() == 4);
    for (int eid : dom.cells()[center].edges) {
        const auto& e = dom.edges()[eid];
        CHECK(std::isfinite(e.lo));
        CHECK(std::isfinite(e.hi));
        CHECK(e.hi - e.lo == doctest::Approx(1.0));   // window length of the unit-square side
    }
}

TEST_CASE("random domains: locate and delta agree with brute force") {
    Rng rng(101);
    for (int rep = 0; rep < 8; ++rep) {
        std::vector<Vec2> pts;
        int n = 4 + int(rng.uniform_int(0, 10));
        for (int i = 0; i < n; ++i)
            pts.push_back({rng.uniform(0, 1), rng.uniform(0, 1)});
        VoronoiDomain dom;
        try {
            dom = VoronoiDomain::build(pts);
        } catch (const InputError&) {
            continue;   // collision in the draw
        }
        // nuclei sorted
        for (size_t i = 1; i < dom.nuclei().size(); ++i) {
            const Vec2 &a = dom.nuclei()[i - 1], &b = dom.nuclei()[i];
            CHECK((a.x < b.x || (a.x == b.x && a.y < b.y)));
        }
        for (int q = 0; q < 1500; ++q) {
            Vec2 z = {rng.uniform(-0.3, 1.3), rng.uniform(-0.3, 1.3)};
            double best = std::numeric_limits<double>::infinity();
            for (const auto& p : dom.nuclei()) best = std::min(best, dist(z, p));
            CHECK(dom.delta(z) == doctest::Approx(best).epsilon(1e-13));
            auto loc = dom.locate(z);
            double dn = dist(z, dom.nuclei()[loc.cell]);
            CHECK(dn == doctest::Approx(best).epsilon(1e-12));
            if (loc.kind == CellLocation::Kind::edge) {
                const auto& e = dom.edges()[loc.edge];
                double da = dist(z, dom.nuclei()[e.cell_a]);
                double db = dist(z, dom.nuclei()[e.cell_b]);
                CHECK(std::abs(da - db) <= 1e-8 * (1 + da));
            }
        }
        // around every corner the incident cells alternate through a full turn
        for (const auto& c : dom.corners()) {
            CHECK(c.cells.size() >= 3);
            std::set<int> seen;
            for (int k = 0; k < 64; ++k) {
                Vec2 probe = c.position + 1e-6 * unit_vec(kTwoPi * k / 64);
                seen.insert(dom.nearest_nucleus(probe));
            }
            for (int cid : c.cells) CHECK(seen.count(cid) == 1);
        }
    }
}

TEST_CASE("build rejects bad input") {
    CHECK_THROWS_AS(VoronoiDomain::build({}), InputError);
    CHECK_THROWS_AS(VoronoiDomain::build({{0, 0}, {0, 0}}), InputError);
    CHECK_THROWS_AS(VoronoiDomain::build({{0, 0}, {1e-12, 0}}), InputError);
    double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(VoronoiDomain::build({{0, 0}, {inf, 0}}), InputError);
    CHECK_THROWS_AS(VoronoiDomain::build({{0, 0}, {std::nan(""), 1}}), InputError);
}

TEST_CASE("two builds of the same input are structurally identical") {
    std::vector<Vec2> pts = {{0.1, 0.9}, {0.8, 0.2}, {0.5, 0.5}, {0.9, 0.9}, {0.05, 0.1}};
    auto a = VoronoiDomain::build(pts);
    auto b = VoronoiDomain::build(pts);
    REQUIRE(a.edges().size() == b.edges().size());
    for (size_t i = 0; i < a.edges().size(); ++i) {
        CHECK(a.edges()[i].point.x == b.edges()[i].point.x);
        CHECK(a.edges()[i].point.y == b.edges()[i].point.y);
        CHECK(a.edges()[i].lo == b.edges()[i].lo);
        CHECK(a.edges()[i].hi == b.edges()[i].hi);
        CHECK(a.edges()[i].cell_a == b.edges()[i].cell_a);
        CHECK(a.edges()[i].cell_b == b.edges()[i].cell_b);
    }
    REQUIRE(a.corners().size() == b.corners().size());
    for (size_t i = 0; i < a.corners().size(); ++i) {
        CHECK(a.corners()[i].position.x == b.corners()[i].position.x);
        CHECK(a.corners()[i].position.y == b.corners()[i].position.y);
    }
}
