#pragma once

#include <cmath>
#include <numbers>

namespace bna {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend constexpr bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// Wraps an angle to (-pi, pi]. std::remainder lands in [-pi, pi]; the lower
// boundary is folded up so the representative of pi is always +pi.
inline double normalize_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

// Strict interior test: points on an edge or vertex report false. A zero
// cross product is treated as exactly on the boundary, so layouts that pin a
// point onto an edge classify it as outside-the-interior deterministically.
inline bool point_strictly_inside_triangle(Vec2 p, Vec2 v0, Vec2 v1, Vec2 v2) {
    double d0 = cross(v1 - v0, p - v0);
    double d1 = cross(v2 - v1, p - v1);
    double d2 = cross(v0 - v2, p - v2);
    bool all_pos = d0 > 0.0 && d1 > 0.0 && d2 > 0.0;
    bool all_neg = d0 < 0.0 && d1 < 0.0 && d2 < 0.0;
    return all_pos || all_neg;
}

}  // namespace bna
