#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "shapeservo/geometry.hpp"
#include "shapeservo/mask.hpp"

namespace shapeservo {

/// Planar elastic rod clamped at a fixed base.
struct RodParams {
    double length = 0.8;          // meters
    int n_segments = 100;
    double flexural_scale = 1.0;  // dimensionless bending stiffness weight
    Vec2 base_position{0.0, 0.0};
    double base_tangent = 0.0;    // radians

    double segment_length() const { return length / n_segments; }
    void validate() const;
};

/// Robot command: grasped-end position, optionally with a clamped end tangent.
struct GraspPose {
    Vec2 position{0.0, 0.0};
    std::optional<double> yaw;  // radians; absent = position-only grasp

    int command_dim() const { return yaw ? 3 : 2; }
    Eigen::VectorXd as_command() const;
    static GraspPose from_command(const Eigen::VectorXd& r);
};

/// Equilibrium configuration: one tangent angle per segment.
struct RodConfiguration {
    Vec2 base_position{0.0, 0.0};
    double base_tangent = 0.0;
    double segment_length = 0.0;
    Eigen::VectorXd angles;

    int n_segments() const { return static_cast<int>(angles.size()); }
    std::vector<Vec2> node_positions() const;  // n_segments + 1 nodes, first = base
    Vec2 tip_position() const;
};

struct SolveStats {
    int iterations = 0;
    double kkt_residual = 0.0;
    bool used_fallback = false;
};

// Margin keeping solves away from the singular straight configuration.
inline constexpr double kReachEpsilon = 1e-3;

double max_reach(const RodParams& params);
bool grasp_reachable(const RodParams& params, const Vec2& position);

// Discrete bending energy of a configuration, including the base-clamp term
// and, when the grasp carries a yaw, the end-clamp term.
double bending_energy(const RodParams& params, const RodConfiguration& config,
                      const std::optional<double>& yaw = std::nullopt);

// Minimize bending energy subject to the end-position equality constraint
// (plus end-tangent clamp when yaw is present). Throws UnreachableError or
// NoConvergenceError.
RodConfiguration solve_shape(const RodParams& params, const GraspPose& grasp,
                             const RodConfiguration* warm_start = nullptr,
                             SolveStats* stats = nullptr);

// N points at equal arc length along the configuration polyline. N >= 3.
Centerline sample_centerline(const RodConfiguration& config, int n_points);

/// Axis-aligned grasp workspace.
struct WorkspaceBox {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{0.0, 0.0};

    bool contains(const Vec2& p) const;
    Vec2 clamp(const Vec2& p) const;
    std::vector<Vec2> corners() const;
    Vec2 center() const { return 0.5 * (lo + hi); }
    double diameter() const { return (hi - lo).norm(); }
};

struct DatasetOptions {
    int n_points = 50;          // centerline samples per shape
    bool with_yaw = false;      // command dimension 3 instead of 2
    double step_fraction = 0.01;  // max walk step as a fraction of rod length
    double yaw_step = 0.02;       // max yaw walk step, radians
};

struct RodSample {
    GraspPose grasp;
    Centerline centerline;
};

// Bounded random walk through the workspace; deterministic under seed.
// All solves are warm started from the previous sample.
std::vector<RodSample> generate_dataset(const RodParams& params, const WorkspaceBox& box,
                                        int n_samples, std::uint64_t seed,
                                        const DatasetOptions& opts = {});

// Binary mask with every pixel within rod_width_px/2 of the rod polyline set.
Mask rasterize_mask(const RodConfiguration& config, const ImageFrame& frame,
                    double rod_width_px);

}  // namespace shapeservo
