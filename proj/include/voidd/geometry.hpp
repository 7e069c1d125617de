#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace voidd {

/// Continuous image coordinates in pixels; pixel centers sit at integer
/// coordinates, x is the column and y the row.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend constexpr Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Ordered list of at least two points with distinct consecutive points.
class Polyline {
public:
    static constexpr double kMinSeparation = 1e-9;

    /// Throws invalid-argument when the invariants do not hold.
    explicit Polyline(std::vector<Point2> points);

    /// Drops consecutive duplicates first; still throws if fewer than two
    /// distinct points remain.
    static Polyline cleaned(std::vector<Point2> points);

    [[nodiscard]] std::span<const Point2> points() const noexcept { return points_; }
    [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
    [[nodiscard]] const Point2& operator[](std::size_t i) const { return points_[i]; }
    [[nodiscard]] const Point2& front() const { return points_.front(); }
    [[nodiscard]] const Point2& back() const { return points_.back(); }

    [[nodiscard]] Polyline reversed() const;

    friend bool operator==(const Polyline&, const Polyline&) = default;

private:
    std::vector<Point2> points_;
};

double polyline_length(const Polyline& p);

/// Cumulative arc length at every vertex; first entry is 0.
std::vector<double> cumulative_length(const Polyline& p);

/// k points at equal arc-length spacing along p, endpoints preserved.
Polyline resample(const Polyline& p, std::size_t k);

/// Point at arc length s (clamped to [0, length]).
Point2 point_at(const Polyline& p, double s);

/// Points of p between arc lengths s0 and s1 (swapped if reversed). Empty when
/// the span is too short to form a polyline.
std::vector<Point2> sub_polyline(const Polyline& p, double s0, double s1);

double point_segment_distance(Point2 q, Point2 a, Point2 b);

struct ClosestPoint {
    double distance = 0.0;
    double arclength = 0.0;  // along the polyline from its first point
    Point2 point;
};

ClosestPoint closest_point(const Polyline& p, Point2 q);

/// Rotation + translation (no scale) taking src onto dst in the least-squares
/// sense: dst[i] ~ R(rotation) * src[i] + translation.
struct RigidFit {
    double rotation = 0.0;
    Point2 translation;
    std::vector<Point2> residual_curve;  // transformed src

    [[nodiscard]] Point2 apply(Point2 p) const;
};

/// Both inputs must have the same point count. Throws degenerate-geometry when
/// all src points coincide.
RigidFit rigid_align(std::span<const Point2> src, std::span<const Point2> dst);
RigidFit rigid_align(const Polyline& src, const Polyline& dst);

double rms_distance(std::span<const Point2> a, std::span<const Point2> b);

}  // namespace voidd
