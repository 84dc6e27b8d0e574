#pragma once

#include <cmath>

namespace horn {

/// Plane vector / point with double components.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }
constexpr Vec2 operator*(double k, Vec2 v) { return {k * v.x, k * v.y}; }
constexpr Vec2 operator*(Vec2 v, double k) { return {k * v.x, k * v.y}; }
constexpr Vec2 operator/(Vec2 v, double k) { return {v.x / k, v.y / k}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// 2-d cross product x1*y2 - x2*y1 (z component of the 3-d cross).
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

constexpr double norm2(Vec2 v) { return dot(v, v); }
inline double norm(Vec2 v) { return std::sqrt(norm2(v)); }

inline Vec2 normalized(Vec2 v) { return v / norm(v); }

/// Counterclockwise quarter turn.
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

/// Rotate counterclockwise by angle (radians).
inline Vec2 rotated(Vec2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Unit vector at polar angle theta measured counterclockwise from the
/// downward direction (0,-1); theta = 0 points straight down.
inline Vec2 unit_from_down(double theta) { return {std::sin(theta), -std::cos(theta)}; }

inline bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

} // namespace horn
