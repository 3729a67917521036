#pragma once

#include <Eigen/Dense>
#include <vector>

namespace shapeservo {

using Vec2 = Eigen::Vector2d;

/// Ordered 2D point chain describing the rod's observable shape.
///
/// Points are adjacent along the rod; the flattened form interleaves
/// coordinates as [u1 v1 u2 v2 ... uN vN].
struct Centerline {
    std::vector<Vec2> points;

    Centerline() = default;
    explicit Centerline(std::vector<Vec2> pts) : points(std::move(pts)) {}

    int size() const { return static_cast<int>(points.size()); }
    bool empty() const { return points.empty(); }

    Eigen::VectorXd flatten() const;
    static Centerline from_flat(const Eigen::VectorXd& v);
};

double polyline_length(const std::vector<Vec2>& pts);

// N points at equal arc-length spacing along the polyline; endpoints preserved.
// Requires pts.size() >= 2 and n >= 2.
std::vector<Vec2> resample_polyline(const std::vector<Vec2>& pts, int n);

// Coefficient of variation (stddev/mean) of consecutive gap lengths.
double gap_length_cov(const Centerline& c);

double point_to_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double point_to_polyline_distance(const Vec2& p, const std::vector<Vec2>& poly);

// Mean distance from each point of `c` to the (densely sampled) truth polyline.
double mean_distance_to_polyline(const Centerline& c, const std::vector<Vec2>& truth);

}  // namespace shapeservo
