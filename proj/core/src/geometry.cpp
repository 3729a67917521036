#include "shapeservo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shapeservo/errors.hpp"

namespace shapeservo {

Eigen::VectorXd Centerline::flatten() const {
    Eigen::VectorXd v(2 * points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        v[2 * i] = points[i].x();
        v[2 * i + 1] = points[i].y();
    }
    return v;
}

Centerline Centerline::from_flat(const Eigen::VectorXd& v) {
    if (v.size() % 2 != 0) {
        throw DimensionMismatchError("flattened centerline must have even length");
    }
    Centerline c;
    c.points.resize(v.size() / 2);
    for (size_t i = 0; i < c.points.size(); ++i) {
        c.points[i] = Vec2(v[2 * i], v[2 * i + 1]);
    }
    return c;
}

double polyline_length(const std::vector<Vec2>& pts) {
    double len = 0.0;
    for (size_t i = 1; i < pts.size(); ++i) {
        len += (pts[i] - pts[i - 1]).norm();
    }
    return len;
}

std::vector<Vec2> resample_polyline(const std::vector<Vec2>& pts, int n) {
    if (pts.size() < 2) {
        throw Error("resample_polyline: need at least 2 input points");
    }
    if (n < 2) {
        throw Error("resample_polyline: need at least 2 output points");
    }

    // Cumulative arc length per input vertex.
    std::vector<double> cum(pts.size(), 0.0);
    for (size_t i = 1; i < pts.size(); ++i) {
        cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
    }
    const double total = cum.back();

    std::vector<Vec2> out;
    out.reserve(n);
    out.push_back(pts.front());
    size_t seg = 1;
    for (int k = 1; k < n - 1; ++k) {
        const double target = total * static_cast<double>(k) / (n - 1);
        while (seg < pts.size() - 1 && cum[seg] < target) ++seg;
        const double seg_len = cum[seg] - cum[seg - 1];
        const double t = seg_len > 0.0 ? (target - cum[seg - 1]) / seg_len : 0.0;
        out.push_back(pts[seg - 1] + t * (pts[seg] - pts[seg - 1]));
    }
    out.push_back(pts.back());
    return out;
}

double gap_length_cov(const Centerline& c) {
    if (c.size() < 2) return 0.0;
    std::vector<double> gaps(c.size() - 1);
    for (int i = 1; i < c.size(); ++i) {
        gaps[i - 1] = (c.points[i] - c.points[i - 1]).norm();
    }
    double mean = 0.0;
    for (double g : gaps) mean += g;
    mean /= gaps.size();
    if (mean <= 0.0) return 0.0;
    double var = 0.0;
    for (double g : gaps) var += (g - mean) * (g - mean);
    var /= gaps.size();
    return std::sqrt(var) / mean;
}

double point_to_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double point_to_polyline_distance(const Vec2& p, const std::vector<Vec2>& poly) {
    if (poly.empty()) throw Error("point_to_polyline_distance: empty polyline");
    if (poly.size() == 1) return (p - poly[0]).norm();
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 1; i < poly.size(); ++i) {
        best = std::min(best, point_to_segment_distance(p, poly[i - 1], poly[i]));
    }
    return best;
}

double mean_distance_to_polyline(const Centerline& c, const std::vector<Vec2>& truth) {
    if (c.empty()) return 0.0;
    double sum = 0.0;
    for (const Vec2& p : c.points) {
        sum += point_to_polyline_distance(p, truth);
    }
    return sum / c.size();
}

}  // namespace shapeservo
