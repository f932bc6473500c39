#pragma once
#include <cmath>
#include <vector>

namespace qhgeo {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a.x += b.x; a.y += b.y; return a; }
inline Vec2& operator-=(Vec2& a, Vec2 b) { a.x -= b.x; a.y -= b.y; return a; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }   // counterclockwise quarter turn
inline Vec2 unit_vec(double angle) { return {std::cos(angle), std::sin(angle)}; }
inline double arg(Vec2 a) { return std::atan2(a.y, a.x); }

Vec2 normalized(Vec2 a);   // throws std::domain_error on zero / non-finite input

// Principal value of an angle, in (-pi, pi]. Values within 1e-12 of -pi map to +pi.
double pr(double theta);

// pr(arg(x) - arg(y)); the angle of x seen from y. Symmetric value pi at opposition.
double ang(Vec2 x, Vec2 y);

enum class Side { left, right, parallel };

// Side of y that x points to: left when ang(x,y) in (0,pi), parallel at exactly 0 or pi.
Side points_left(Vec2 x, Vec2 y);

struct Polyline {
    std::vector<Vec2> vertices;
    bool closed = false;
};

// Winding of a closed polyline about z, by exact summation of principal turn
// increments per segment. Throws if z sits on the polyline (within a relative
// tolerance) or the loop has fewer than 3 vertices.
int winding_number(const Polyline& loop, Vec2 z);

enum class Curving { left, right, mixed };

struct CurvingResult {
    Curving value;
    bool straight;   // all turn increments within +-tol; reported as left by convention
};

// Classifies a sampled tangent sequence by the sign of successive
// pr(ang(t[i+1], t[i])) increments. tol is the per-step dead band.
CurvingResult curving_sign(const std::vector<Vec2>& tangents, double tol = 1e-9);

} // namespace qhgeo
