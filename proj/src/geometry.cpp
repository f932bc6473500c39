#include "qhgeo/geometry.hpp"

#include <algorithm>
#include <stdexcept>

#include "qhgeo/errors.hpp"

namespace qhgeo {

Vec2 normalized(Vec2 a) {
    double n = norm(a);
    if (!(n > 0.0) || !std::isfinite(n))
        throw std::domain_error("normalized: zero or non-finite vector");
    return a / n;
}

double pr(double theta) {
    if (!std::isfinite(theta)) throw std::domain_error("pr: non-finite angle");
    double v = std::remainder(theta, kTwoPi);   // lands in [-pi, pi]
    if (v <= -kPi + 1e-12) v = kPi;
    return v;
}

double ang(Vec2 x, Vec2 y) {
    if (norm2(x) == 0.0 || norm2(y) == 0.0)
        throw std::domain_error("ang: zero vector has no direction");
    if (!std::isfinite(x.x) || !std::isfinite(x.y) || !std::isfinite(y.x) || !std::isfinite(y.y))
        throw std::domain_error("ang: non-finite input");
    // atan2 of (sin, cos) of the angle difference; exact for collinear inputs.
    return pr(std::atan2(cross(y, x), dot(y, x)));
}

Side points_left(Vec2 x, Vec2 y) {
    double a = ang(x, y);
    if (a == 0.0 || a == kPi) return Side::parallel;
    return a > 0.0 ? Side::left : Side::right;
}

namespace {

double dist_point_segment(Vec2 z, Vec2 a, Vec2 b) {
    Vec2 d = b - a;
    double l2 = norm2(d);
    if (l2 == 0.0) return dist(z, a);
    double t = std::clamp(dot(z - a, d) / l2, 0.0, 1.0);
    return dist(z, a + t * d);
}

} // namespace

int winding_number(const Polyline& loop, Vec2 z) {
    const auto& v = loop.vertices;
    if (v.size() < 3) throw InputError("winding_number: need at least 3 vertices");
    if (!loop.closed) throw InputError("winding_number: polyline is not closed");

    double far = 0.0;
    for (const Vec2& p : v) far = std::max(far, dist(p, z));
    double tol = 1e-9 * std::max(1.0, far);

    double total = 0.0;
    size_t n = v.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = v[i];
        Vec2 b = v[(i + 1) % n];
        if (dist_point_segment(z, a, b) <= tol)
            throw std::domain_error("winding_number: point lies on the polyline");
        total += ang(b - z, a - z);
    }
    return static_cast<int>(std::lround(total / kTwoPi));
}

CurvingResult curving_sign(const std::vector<Vec2>& tangents, double tol) {
    if (tangents.size() < 3) throw InputError("curving_sign: need at least 3 tangent samples");
    bool pos = false, neg = false;
    for (size_t i = 0; i + 1 < tangents.size(); ++i) {
        double d = ang(tangents[i + 1], tangents[i]);
        if (d > tol) pos = true;
        else if (d < -tol) neg = true;
    }
    if (pos && neg) return {Curving::mixed, false};
    if (!pos && !neg) return {Curving::left, true};   // straight runs count as left
    return {pos ? Curving::left : Curving::right, false};
}

} // namespace qhgeo
