#include "voidd/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "voidd/error.hpp"

namespace voidd {

Polyline::Polyline(std::vector<Point2> points) : points_(std::move(points)) {
    if (points_.size() < 2) {
        throw_invalid_argument("polyline needs at least 2 points, got " + std::to_string(points_.size()));
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y)) {
            throw_invalid_argument("polyline point " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && distance(points_[i], points_[i - 1]) <= kMinSeparation) {
            throw_invalid_argument("polyline points " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                   " coincide");
        }
    }
}

Polyline Polyline::cleaned(std::vector<Point2> points) {
    std::vector<Point2> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        if (out.empty() || distance(out.back(), p) > kMinSeparation) out.push_back(p);
    }
    return Polyline(std::move(out));
}

Polyline Polyline::reversed() const {
    std::vector<Point2> r(points_.rbegin(), points_.rend());
    return Polyline(std::move(r));
}

double polyline_length(const Polyline& p) {
    double len = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) len += distance(p[i - 1], p[i]);
    return len;
}

std::vector<double> cumulative_length(const Polyline& p) {
    std::vector<double> acc(p.size(), 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) acc[i] = acc[i - 1] + distance(p[i - 1], p[i]);
    return acc;
}

namespace {

// Interpolates on the segment that contains arc length s; `seg` is advanced
// monotonically so sequential queries stay linear overall.
Point2 interpolate(const Polyline& p, const std::vector<double>& acc, double s, std::size_t& seg) {
    const std::size_t last = p.size() - 1;
    while (seg + 1 < last && acc[seg + 1] < s) ++seg;
    const double seg_len = acc[seg + 1] - acc[seg];
    const double t = std::clamp((s - acc[seg]) / seg_len, 0.0, 1.0);
    return p[seg] + t * (p[seg + 1] - p[seg]);
}

}  // namespace

Polyline resample(const Polyline& p, std::size_t k) {
    if (k < 2) throw_invalid_argument("resample count must be >= 2, got " + std::to_string(k));
    const auto acc = cumulative_length(p);
    const double total = acc.back();
    std::vector<Point2> out;
    out.reserve(k);
    out.push_back(p.front());
    std::size_t seg = 0;
    for (std::size_t i = 1; i + 1 < k; ++i) {
        const double s = total * static_cast<double>(i) / static_cast<double>(k - 1);
        out.push_back(interpolate(p, acc, s, seg));
    }
    out.push_back(p.back());
    return Polyline::cleaned(std::move(out));
}

Point2 point_at(const Polyline& p, double s) {
    const auto acc = cumulative_length(p);
    s = std::clamp(s, 0.0, acc.back());
    std::size_t seg = 0;
    return interpolate(p, acc, s, seg);
}

std::vector<Point2> sub_polyline(const Polyline& p, double s0, double s1) {
    const auto acc = cumulative_length(p);
    s0 = std::clamp(s0, 0.0, acc.back());
    s1 = std::clamp(s1, 0.0, acc.back());
    if (s1 < s0) std::swap(s0, s1);
    std::vector<Point2> out;
    if (s1 - s0 <= Polyline::kMinSeparation) return out;
    std::size_t seg = 0;
    out.push_back(interpolate(p, acc, s0, seg));
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (acc[i] > s0 && acc[i] < s1) out.push_back(p[i]);
    }
    seg = 0;
    out.push_back(interpolate(p, acc, s1, seg));
    std::vector<Point2> dedup;
    for (const auto& q : out) {
        if (dedup.empty() || distance(dedup.back(), q) > Polyline::kMinSeparation) dedup.push_back(q);
    }
    if (dedup.size() < 2) dedup.clear();
    return dedup;
}

double point_segment_distance(Point2 q, Point2 a, Point2 b) {
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) return distance(q, a);
    const double t = dot(q - a, ab) / len2;
    if (t <= 0.0) return distance(q, a);
    if (t >= 1.0) return distance(q, b);
    return std::abs(cross(ab, q - a)) / std::sqrt(len2);
}

ClosestPoint closest_point(const Polyline& p, Point2 q) {
    ClosestPoint best;
    best.distance = std::numeric_limits<double>::infinity();
    double walked = 0.0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        const Point2 a = p[i - 1];
        const Point2 ab = p[i] - a;
        const double len2 = dot(ab, ab);
        const double seg_len = std::sqrt(len2);
        const double t = std::clamp(dot(q - a, ab) / len2, 0.0, 1.0);
        const Point2 c = a + t * ab;
        const double d = distance(q, c);
        if (d < best.distance) {
            best.distance = d;
            best.arclength = walked + t * seg_len;
            best.point = c;
        }
        walked += seg_len;
    }
    return best;
}

Point2 RigidFit::apply(Point2 p) const {
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    return Point2{c * p.x - s * p.y, s * p.x + c * p.y} + translation;
}

RigidFit rigid_align(std::span<const Point2> src, std::span<const Point2> dst) {
    if (src.size() != dst.size() || src.size() < 2) {
        throw_invalid_argument("rigid_align needs equal point counts >= 2 (got " + std::to_string(src.size()) +
                               " and " + std::to_string(dst.size()) + ")");
    }
    const double n = static_cast<double>(src.size());
    Point2 cs, cd;
    for (std::size_t i = 0; i < src.size(); ++i) {
        cs = cs + src[i];
        cd = cd + dst[i];
    }
    cs = (1.0 / n) * cs;
    cd = (1.0 / n) * cd;

    double spread = 0.0;
    double sum_dot = 0.0;
    double sum_cross = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const Point2 a = src[i] - cs;
        const Point2 b = dst[i] - cd;
        spread += dot(a, a);
        sum_dot += dot(a, b);
        sum_cross += cross(a, b);
    }
    if (spread <= 1e-18) throw Error(ErrorKind::DegenerateGeometry, "rigid_align source points all coincide");

    RigidFit fit;
    fit.rotation = std::atan2(sum_cross, sum_dot);
    const double c = std::cos(fit.rotation);
    const double s = std::sin(fit.rotation);
    fit.translation = cd - Point2{c * cs.x - s * cs.y, s * cs.x + c * cs.y};
    fit.residual_curve.reserve(src.size());
    for (const auto& p : src) fit.residual_curve.push_back(fit.apply(p));
    return fit;
}

RigidFit rigid_align(const Polyline& src, const Polyline& dst) {
    return rigid_align(src.points(), dst.points());
}

double rms_distance(std::span<const Point2> a, std::span<const Point2> b) {
    if (a.size() != b.size() || a.empty()) throw_invalid_argument("rms_distance needs equal non-empty inputs");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Point2 d = a[i] - b[i];
        acc += dot(d, d);
    }
    return std::sqrt(acc / static_cast<double>(a.size()));
}

}  // namespace voidd
