#include "shapeservo/rod.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "shapeservo/errors.hpp"

namespace shapeservo {

namespace {

double wrap_angle(double a) {
    a = std::fmod(a + M_PI, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    return a - M_PI;
}

// Symmetric tridiagonal LDL^T factorization and solve.
struct Tridiag {
    Eigen::VectorXd diag;  // pivots after factor()
    Eigen::VectorXd off;   // multipliers after factor()

    // Returns false on a non-positive pivot (matrix not positive definite).
    bool factor() {
        const int n = static_cast<int>(diag.size());
        for (int i = 0; i + 1 < n; ++i) {
            if (diag[i] <= 0.0) return false;
            const double e = off[i];
            off[i] = e / diag[i];
            diag[i + 1] -= off[i] * e;
        }
        return diag[n - 1] > 0.0;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
        const int n = static_cast<int>(diag.size());
        Eigen::VectorXd x = b;
        for (int i = 1; i < n; ++i) x[i] -= off[i - 1] * x[i - 1];
        for (int i = 0; i < n; ++i) x[i] /= diag[i];
        for (int i = n - 2; i >= 0; --i) x[i] -= off[i] * x[i + 1];
        return x;
    }
};

// Quadratic form of the bending energy: E = w (theta^T K theta - 2 f^T theta + const).
struct EnergyModel {
    int n = 0;
    double w = 0.0;  // EI / ds
    double t0 = 0.0;
    std::optional<double> yaw;

    double energy(const Eigen::VectorXd& th) const {
        double e = 2.0 * (th[0] - t0) * (th[0] - t0);
        for (int i = 0; i + 1 < n; ++i) {
            const double d = th[i + 1] - th[i];
            e += d * d;
        }
        if (yaw) {
            const double d = *yaw - th[n - 1];
            e += 2.0 * d * d;
        }
        return w * e;
    }

    Eigen::VectorXd gradient(const Eigen::VectorXd& th) const {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
        g[0] += 4.0 * (th[0] - t0);
        for (int i = 0; i + 1 < n; ++i) {
            const double d = th[i + 1] - th[i];
            g[i] -= 2.0 * d;
            g[i + 1] += 2.0 * d;
        }
        if (yaw) g[n - 1] -= 4.0 * (*yaw - th[n - 1]);
        return w * g;
    }

    // Constant Hessian of the energy (tridiagonal).
    void hessian(Eigen::VectorXd& diag, Eigen::VectorXd& off) const {
        diag.setConstant(n, 0.0);
        off.setConstant(n - 1, 0.0);
        diag[0] += 4.0;
        for (int i = 0; i + 1 < n; ++i) {
            diag[i] += 2.0;
            diag[i + 1] += 2.0;
            off[i] -= 2.0;
        }
        if (yaw) diag[n - 1] += 4.0;
        diag *= w;
        off *= w;
    }
};

struct ConstraintModel {
    double ds = 0.0;
    Vec2 target{0.0, 0.0};  // grasp position relative to the base

    Eigen::Vector2d value(const Eigen::VectorXd& th) const {
        double cx = 0.0, cy = 0.0;
        for (int i = 0; i < th.size(); ++i) {
            cx += std::cos(th[i]);
            cy += std::sin(th[i]);
        }
        return {ds * cx - target.x(), ds * cy - target.y()};
    }

    // 2 x n Jacobian.
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& th) const {
        Eigen::MatrixXd a(2, th.size());
        for (int i = 0; i < th.size(); ++i) {
            a(0, i) = -ds * std::sin(th[i]);
            a(1, i) = ds * std::cos(th[i]);
        }
        return a;
    }
};

// Constant-curvature initial guess: the arc of length L whose chord matches
// the grasp offset. Two bending branches; the caller picks by energy.
double solve_arc_half_angle(double chord_over_length) {
    // sin(g)/g = chord/L on (0, pi).
    double lo = 1e-12, hi = M_PI - 1e-12;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = std::sin(mid) / mid;
        if (v > chord_over_length) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Eigen::VectorXd arc_guess(int n, double chord_angle, double half_angle, int branch) {
    Eigen::VectorXd th(n);
    const double sgn = branch >= 0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) / n;  // midpoint parameter in [0, 1]
        th[i] = chord_angle + sgn * (-half_angle + 2.0 * half_angle * t);
    }
    return th;
}

struct NewtonResult {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

double kkt_residual(const EnergyModel& em, const ConstraintModel& cm,
                    const Eigen::VectorXd& th, const Eigen::Vector2d& lambda,
                    double length) {
    const Eigen::VectorXd dual = em.gradient(th) + cm.jacobian(th).transpose() * lambda;
    const double rd = dual.lpNorm<Eigen::Infinity>() / (1.0 + 2.0 * em.w);
    const double rp = cm.value(th).lpNorm<Eigen::Infinity>() / (1.0 + length);
    return std::max(rd, rp);
}

NewtonResult newton_solve(const EnergyModel& em, const ConstraintModel& cm, double length,
                          Eigen::VectorXd& th, Eigen::Vector2d& lambda, int max_iters,
                          double tol) {
    const int n = em.n;
    NewtonResult res;
    Eigen::VectorXd h_diag(n), h_off(n - 1), e_diag(n), e_off(n - 1);
    em.hessian(e_diag, e_off);

    // Least-squares multiplier estimate from the current iterate.
    {
        const Eigen::MatrixXd a = cm.jacobian(th);
        const Eigen::Matrix2d aat = a * a.transpose();
        if (std::abs(aat.determinant()) > 1e-16) {
            lambda = aat.ldlt().solve(-a * em.gradient(th));
        }
    }

    double nu = 1.0;
    for (int iter = 0; iter < max_iters; ++iter) {
        res.iterations = iter;
        const Eigen::VectorXd grad = em.gradient(th);
        const Eigen::Vector2d g = cm.value(th);
        const Eigen::MatrixXd a = cm.jacobian(th);

        res.residual = kkt_residual(em, cm, th, lambda, length);
        if (res.residual <= tol) {
            res.converged = true;
            return res;
        }

        // Lagrangian Hessian: energy part plus constraint curvature.
        h_diag = e_diag;
        h_off = e_off;
        for (int i = 0; i < n; ++i) {
            h_diag[i] += -lambda[0] * a(1, i) + lambda[1] * a(0, i);
            // d2(cos)/dth2 = -cos -> -lambda_x * ds * cos = lambda_x * (-ds cos)
            // a(1,i) = ds cos, a(0,i) = -ds sin; above implements
            // -lambda_x ds cos - lambda_y ds sin.
        }

        // Factor with escalating diagonal regularization until positive definite.
        Tridiag f;
        double tau = 0.0;
        bool factored = false;
        for (int attempt = 0; attempt < 60 && !factored; ++attempt) {
            f.diag = h_diag.array() + tau;
            f.off = h_off;
            factored = f.factor();
            if (!factored) tau = std::max(2.0 * tau, 1e-8 * (1.0 + 2.0 * em.w)) * 10.0;
        }
        if (!factored) break;

        // Schur complement on the two constraint rows.
        const Eigen::VectorXd y0 = f.solve(-grad);
        Eigen::MatrixXd x(n, 2);
        x.col(0) = f.solve(a.row(0).transpose());
        x.col(1) = f.solve(a.row(1).transpose());
        const Eigen::Matrix2d s = a * x;
        const Eigen::Vector2d lam_new = s.ldlt().solve(a * y0 + g);
        const Eigen::VectorXd dth = y0 - x * lam_new;
        if (!dth.allFinite() || !lam_new.allFinite()) break;

        nu = std::max({nu, 2.0 * lam_new.lpNorm<Eigen::Infinity>() + 1.0});
        const double merit0 = em.energy(th) + nu * g.norm();

        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            const Eigen::VectorXd cand = th + alpha * dth;
            const double merit = em.energy(cand) + nu * cm.value(cand).norm();
            if (merit <= merit0 - 1e-12 * alpha * dth.squaredNorm() ||
                (alpha < 1e-8 && merit <= merit0 + 1e-14 * std::abs(merit0))) {
                th = cand;
                lambda = lam_new;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;
    }
    res.residual = kkt_residual(em, cm, th, lambda, length);
    res.converged = res.residual <= tol;
    return res;
}

// Quadratic-penalty descent used when the Newton iteration stalls.
void penalty_descent(const EnergyModel& em, const ConstraintModel& cm, Eigen::VectorXd& th) {
    for (double mu : {1e2, 1e4, 1e6}) {
        const double scale = mu * em.w;
        auto value = [&](const Eigen::VectorXd& t) {
            return em.energy(t) + 0.5 * scale * cm.value(t).squaredNorm();
        };
        auto gradient = [&](const Eigen::VectorXd& t) {
            return (em.gradient(t) + scale * cm.jacobian(t).transpose() * cm.value(t)).eval();
        };
        Eigen::VectorXd g_prev = gradient(th);
        Eigen::VectorXd th_prev = th;
        double step = 1.0 / (1.0 + scale);
        for (int it = 0; it < 400; ++it) {
            Eigen::VectorXd g = gradient(th);
            if (g.lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + scale)) break;
            if (it > 0) {
                // Barzilai-Borwein step length.
                const Eigen::VectorXd dth = th - th_prev;
                const Eigen::VectorXd dg = g - g_prev;
                const double denom = dg.squaredNorm();
                if (denom > 0.0) step = std::abs(dth.dot(dg)) / denom;
            }
            th_prev = th;
            g_prev = g;
            const double v0 = value(th);
            double alpha = step;
            for (int ls = 0; ls < 40; ++ls) {
                Eigen::VectorXd cand = th - alpha * g;
                if (value(cand) < v0) {
                    th = cand;
                    break;
                }
                alpha *= 0.5;
            }
        }
    }
}

}  // namespace

void RodParams::validate() const {
    if (!(length > 0.0)) throw Error("RodParams: length must be positive");
    if (n_segments < 10) throw Error("RodParams: n_segments must be >= 10");
    if (!(flexural_scale > 0.0)) throw Error("RodParams: flexural_scale must be positive");
}

Eigen::VectorXd GraspPose::as_command() const {
    Eigen::VectorXd r(command_dim());
    r[0] = position.x();
    r[1] = position.y();
    if (yaw) r[2] = *yaw;
    return r;
}

GraspPose GraspPose::from_command(const Eigen::VectorXd& r) {
    if (r.size() != 2 && r.size() != 3) {
        throw DimensionMismatchError("GraspPose: command must have 2 or 3 entries");
    }
    GraspPose g;
    g.position = Vec2(r[0], r[1]);
    if (r.size() == 3) g.yaw = r[2];
    return g;
}

std::vector<Vec2> RodConfiguration::node_positions() const {
    std::vector<Vec2> nodes(angles.size() + 1);
    nodes[0] = base_position;
    for (int i = 0; i < angles.size(); ++i) {
        nodes[i + 1] =
            nodes[i] + segment_length * Vec2(std::cos(angles[i]), std::sin(angles[i]));
    }
    return nodes;
}

Vec2 RodConfiguration::tip_position() const {
    Vec2 tip = base_position;
    for (int i = 0; i < angles.size(); ++i) {
        tip += segment_length * Vec2(std::cos(angles[i]), std::sin(angles[i]));
    }
    return tip;
}

double max_reach(const RodParams& params) { return params.length * (1.0 - kReachEpsilon); }

bool grasp_reachable(const RodParams& params, const Vec2& position) {
    return (position - params.base_position).norm() <= max_reach(params);
}

double bending_energy(const RodParams& params, const RodConfiguration& config,
                      const std::optional<double>& yaw) {
    EnergyModel em;
    em.n = config.n_segments();
    em.w = params.flexural_scale / config.segment_length;
    em.t0 = config.base_tangent;
    em.yaw = yaw;
    return em.energy(config.angles);
}

RodConfiguration solve_shape(const RodParams& params, const GraspPose& grasp,
                             const RodConfiguration* warm_start, SolveStats* stats) {
    params.validate();
    const int n = params.n_segments;
    const double ds = params.segment_length();
    const Vec2 offset = grasp.position - params.base_position;
    const double dist = offset.norm();

    RodConfiguration config;
    config.base_position = params.base_position;
    config.base_tangent = params.base_tangent;
    config.segment_length = ds;

    if (dist > params.length * (1.0 + 1e-9)) {
        throw UnreachableError("grasp beyond rod length");
    }
    if (dist > max_reach(params)) {
        // The fully extended rod is the unique feasible configuration when the
        // distance equals the length exactly; anything else in the band is the
        // singular region the reach margin guards.
        if (std::abs(dist - params.length) <= 1e-9 * params.length) {
            config.angles = Eigen::VectorXd::Constant(n, std::atan2(offset.y(), offset.x()));
            if (stats) *stats = SolveStats{0, 0.0, false};
            return config;
        }
        throw UnreachableError("grasp inside the singular reach margin");
    }

    EnergyModel em;
    em.n = n;
    em.w = params.flexural_scale / ds;
    em.t0 = params.base_tangent;
    em.yaw = grasp.yaw;

    ConstraintModel cm;
    cm.ds = ds;
    cm.target = offset;

    const double tol = 1e-11;
    const int cap = 500;

    std::vector<Eigen::VectorXd> starts;
    if (warm_start && warm_start->angles.size() == n) {
        starts.push_back(warm_start->angles);
    } else {
        const double chord_angle = std::atan2(offset.y(), offset.x());
        const double gamma = solve_arc_half_angle(std::min(dist / params.length, 1.0 - 1e-12));
        Eigen::VectorXd a = arc_guess(n, chord_angle, gamma, +1);
        Eigen::VectorXd b = arc_guess(n, chord_angle, gamma, -1);
        if (em.energy(b) < em.energy(a)) std::swap(a, b);
        starts.push_back(a);
        starts.push_back(b);
    }

    int used_iters = 0;
    bool fallback = false;
    double last_residual = 0.0;
    for (const Eigen::VectorXd& start : starts) {
        Eigen::VectorXd th = start;
        Eigen::Vector2d lambda = Eigen::Vector2d::Zero();
        NewtonResult nr = newton_solve(em, cm, params.length, th, lambda, cap / 2, tol);
        used_iters += nr.iterations;
        if (!nr.converged) {
            fallback = true;
            penalty_descent(em, cm, th);
            nr = newton_solve(em, cm, params.length, th, lambda, cap - used_iters, tol);
            used_iters += nr.iterations;
        }
        last_residual = nr.residual;
        if (nr.converged || nr.residual <= 1e-6) {
            config.angles = th;
            if (stats) *stats = SolveStats{used_iters, nr.residual, fallback};
            return config;
        }
    }
    throw NoConvergenceError("equilibrium solve hit the iteration cap with residual " +
                             std::to_string(last_residual));
}

Centerline sample_centerline(const RodConfiguration& config, int n_points) {
    if (n_points < 3) throw Error("sample_centerline: need at least 3 points");
    return Centerline(resample_polyline(config.node_positions(), n_points));
}

bool WorkspaceBox::contains(const Vec2& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
}

Vec2 WorkspaceBox::clamp(const Vec2& p) const {
    return {std::clamp(p.x(), lo.x(), hi.x()), std::clamp(p.y(), lo.y(), hi.y())};
}

std::vector<Vec2> WorkspaceBox::corners() const {
    return {lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}};
}

std::vector<RodSample> generate_dataset(const RodParams& params, const WorkspaceBox& box,
                                        int n_samples, std::uint64_t seed,
                                        const DatasetOptions& opts) {
    params.validate();
    if (n_samples < 1) throw Error("generate_dataset: n_samples must be >= 1");
    for (const Vec2& c : box.corners()) {
        if (!grasp_reachable(params, c)) {
            throw Error("generate_dataset: workspace box not entirely reachable");
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double max_step = opts.step_fraction * params.length;

    std::vector<RodSample> samples;
    samples.reserve(n_samples);

    Vec2 pos = box.center();
    double yaw = std::atan2(pos.y() - params.base_position.y(),
                            pos.x() - params.base_position.x());
    RodConfiguration prev;
    bool have_prev = false;

    for (int k = 0; k < n_samples; ++k) {
        if (k > 0) {
            const double ang = 2.0 * M_PI * unit(rng);
            const double mag = max_step * unit(rng);
            pos = box.clamp(pos + mag * Vec2(std::cos(ang), std::sin(ang)));
            if (opts.with_yaw) yaw = wrap_angle(yaw + opts.yaw_step * (2.0 * unit(rng) - 1.0));
        }
        GraspPose grasp;
        grasp.position = pos;
        if (opts.with_yaw) grasp.yaw = yaw;
        try {
            RodConfiguration cfg =
                solve_shape(params, grasp, have_prev ? &prev : nullptr, nullptr);
            samples.push_back({grasp, sample_centerline(cfg, opts.n_points)});
            prev = std::move(cfg);
            have_prev = true;
        } catch (const NoConvergenceError& e) {
            throw NoConvergenceError("sample " + std::to_string(k) + ": " + e.what());
        }
    }
    return samples;
}

Mask rasterize_mask(const RodConfiguration& config, const ImageFrame& frame,
                    double rod_width_px) {
    if (!(rod_width_px > 0.0)) throw Error("rasterize_mask: rod width must be positive");
    const std::vector<Vec2> nodes = config.node_positions();
    const double half = 0.5 * rod_width_px;

    std::vector<Vec2> px(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
        px[i] = frame.to_pixel(nodes[i]);
        if (px[i].x() - half < 0.0 || px[i].x() + half > frame.width - 1 ||
            px[i].y() - half < 0.0 || px[i].y() + half > frame.height - 1) {
            throw OutOfFrameError("rod does not fit in the image at this scale");
        }
    }

    Mask mask(frame.width, frame.height);
    for (size_t i = 1; i < px.size(); ++i) {
        const Vec2& a = px[i - 1];
        const Vec2& b = px[i];
        const int x0 = static_cast<int>(std::floor(std::min(a.x(), b.x()) - half));
        const int x1 = static_cast<int>(std::ceil(std::max(a.x(), b.x()) + half));
        const int y0 = static_cast<int>(std::floor(std::min(a.y(), b.y()) - half));
        const int y1 = static_cast<int>(std::ceil(std::max(a.y(), b.y()) + half));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                if (!mask.in_bounds(x, y) || mask.at(x, y)) continue;
                if (point_to_segment_distance(Vec2(x, y), a, b) <= half) {
                    mask.at(x, y) = 255;
                }
            }
        }
    }
    return mask;
}

}  // namespace shapeservo
