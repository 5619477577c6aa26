#include "traytilt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace traytilt {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// The regularized stick slope mu*N/v_stick can exceed what an explicit step
// integrates stably when the normal force spikes, so it is capped at the
// slope that removes the contact's tangential momentum in one step (an
// impulse-limited stick). Within the Coulomb cone this brings the contact
// point to rest instead of chattering.
constexpr double kStickSlopeBudget = 1.0;

// Same idea for the normal damper: a large c_wall acts as inelastic capture,
// limited to the coefficient that kills half the approach momentum per step.
constexpr double kDampingBudget = 0.5;

// Extra clearance applied by the final free-space projection so the pushed
// pose is strictly inside despite rounding.
constexpr double kProjectionMargin = 1e-12;

struct WallHit {
    int vertex;
    int wall;
    double depth;
};

struct FloorContext {
    double mass = 0.0;
    double normal_accel = 0.0;  // g cos(tilt)
    double v_stick = 0.0;
};

// Floor friction about the COM for the body at rotation (c, s), COM position
// pos, linear velocity vel, angular velocity omega.
ForceTorque floor_kernel(std::span<const SupportPoint> supports,
                         const FrictionField& field, const FloorContext& ctx,
                         double c, double s, Vec2 pos, Vec2 vel, double omega) {
    ForceTorque out;
    const double v_stick2 = ctx.v_stick * ctx.v_stick;
    for (const SupportPoint& sp : supports) {
        const Vec2 r = rotate(sp.point, c, s);
        const Vec2 w = pos + r;
        const Vec2 vp{vel.x - omega * r.y, vel.y + omega * r.x};
        const double load = sp.share * ctx.mass * ctx.normal_accel;
        const double mu_n = field.mu_at(w) * load;
        const double speed2 = vp.norm2();
        Vec2 f;
        if (speed2 > v_stick2) {
            const double scale = -mu_n / std::sqrt(speed2);
            f = vp * scale;
        } else {
            f = vp * (-mu_n / ctx.v_stick);
        }
        out.force += f;
        out.torque += r.cross(f);
    }
    return out;
}

struct WallContext {
    Tray tray;
    SimParams params;
    double mass = 0.0;
    double inertia = 0.0;
};

// Spring-damper normal force plus regularized Coulomb tangential force for
// every penetrating vertex. Returns the deepest penetration via max_depth.
ForceTorque wall_kernel(std::span<const Vec2> verts_local,
                        const WallContext& ctx, double c, double s, Vec2 pos,
                        Vec2 vel, double omega, double& max_depth,
                        std::vector<WallHit>& hits) {
    ForceTorque out;
    max_depth = 0.0;

    hits.clear();
    const int n_verts = static_cast<int>(verts_local.size());
    for (int i = 0; i < n_verts; ++i) {
        const Vec2 w = rotate(verts_local[std::size_t(i)], c, s) + pos;
        if (w.x < 0.0) hits.push_back({i, 0, -w.x});
        if (w.x > ctx.tray.a) hits.push_back({i, 1, w.x - ctx.tray.a});
        if (w.y < 0.0) hits.push_back({i, 2, -w.y});
        if (w.y > ctx.tray.b) hits.push_back({i, 3, w.y - ctx.tray.b});
    }
    if (hits.empty()) return out;

    // Inward normals indexed by wall id (left, right, bottom, top).
    static constexpr Vec2 kNormals[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    const SimParams& p = ctx.params;
    const int n_hits = static_cast<int>(hits.size());

    for (int h = 0; h < n_hits; ++h) {
        const WallHit& hit = hits[std::size_t(h)];
        const Vec2 r = rotate(verts_local[std::size_t(hit.vertex)], c, s);
        const Vec2 u{vel.x - omega * r.y, vel.y + omega * r.x};
        const Vec2 n = kNormals[hit.wall];
        const double approach = -u.dot(n);
        const double m_eff =
            1.0 / (1.0 / ctx.mass + r.norm2() / ctx.inertia);
        const double c_eff = std::min(
            p.c_wall, kDampingBudget * m_eff / (p.dt * static_cast<double>(n_hits)));
        const double normal_mag =
            p.k_wall * hit.depth + c_eff * std::max(0.0, approach);
        const Vec2 t = n.perp();
        const double vt = u.dot(t);

        const double slope_cap =
            kStickSlopeBudget * m_eff / (p.dt * static_cast<double>(n_hits));
        const double slope = std::min(p.mu_wall * normal_mag / p.v_stick, slope_cap);
        const double ft_mag =
            std::min(p.mu_wall * normal_mag, slope * std::fabs(vt));

        const Vec2 f = n * normal_mag - t * std::copysign(ft_mag, vt);
        out.force += f;
        out.torque += r.cross(f);
        max_depth = std::max(max_depth, hit.depth);
    }
    return out;
}

}  // namespace

const Vec2 kTiltDirections[8] = {
    {1.0, 0.0},        {kInvSqrt2, kInvSqrt2},   {0.0, 1.0},
    {-kInvSqrt2, kInvSqrt2}, {-1.0, 0.0},        {-kInvSqrt2, -kInvSqrt2},
    {0.0, -1.0},       {kInvSqrt2, -kInvSqrt2},
};

void TiltAction::validate() const {
    if (direction < 0 || direction > 7) {
        throw std::invalid_argument("tilt direction index must be in 0..7");
    }
    if (!(tilt_angle > 0.0) || !(tilt_angle < std::numbers::pi / 2.0)) {
        throw std::invalid_argument("tilt angle must be in (0, pi/2)");
    }
}

void SimParams::validate() const {
    const bool positive = dt > 0 && g > 0 && k_wall > 0 && c_wall > 0 &&
                          mu_wall > 0 && v_stick > 0 && n_support >= 2 &&
                          settle_v > 0 && settle_w > 0 && settle_hold > 0 &&
                          max_sim_time > 0;
    if (!positive) {
        throw std::invalid_argument("all simulation parameters must be positive");
    }
    if (dt > 1e-3) {
        throw std::invalid_argument("dt must be <= 1e-3 s");
    }
    if (!(settle_v < v_stick)) {
        throw std::invalid_argument("settle_v must be below v_stick");
    }
}

std::vector<SupportPoint> support_points(const PartShape& shape, int n_support) {
    if (n_support < 2) {
        throw std::invalid_argument("n_support must be >= 2");
    }
    Vec2 lo{1e30, 1e30}, hi{-1e30, -1e30};
    for (const Vec2& v : shape.vertices()) {
        lo.x = std::min(lo.x, v.x);
        lo.y = std::min(lo.y, v.y);
        hi.x = std::max(hi.x, v.x);
        hi.y = std::max(hi.y, v.y);
    }
    std::vector<SupportPoint> pts;
    for (int refine = 0; refine < 3; ++refine) {
        const int n = n_support << refine;
        pts.clear();
        const double dx = (hi.x - lo.x) / n;
        const double dy = (hi.y - lo.y) / n;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const Vec2 p{lo.x + (i + 0.5) * dx, lo.y + (j + 0.5) * dy};
                if (shape.contains(p)) pts.push_back({p, 0.0});
            }
        }
        if (pts.size() >= 3) {
            const double share = 1.0 / static_cast<double>(pts.size());
            for (SupportPoint& sp : pts) sp.share = share;
            return pts;
        }
    }
    throw GeometryError("shape '" + shape.name() +
                        "' thinner than the support grid at 4x refinement");
}

ForceTorque floor_friction(const RigidBody& body, const BodyState& state,
                           std::span<const SupportPoint> supports,
                           const FrictionField& field, const TiltAction& action,
                           const SimParams& params) {
    action.validate();
    FloorContext ctx{body.mass, params.g * std::cos(action.tilt_angle),
                     params.v_stick};
    return floor_kernel(supports, field, ctx, std::cos(state.pose.theta),
                        std::sin(state.pose.theta),
                        {state.pose.x, state.pose.y}, state.velocity,
                        state.omega);
}

ForceTorque wall_forces(const RigidBody& body, const BodyState& state,
                        const Tray& tray, const SimParams& params,
                        double* max_depth_out) {
    WallContext ctx{tray, params, body.mass, body.inertia};
    double max_depth = 0.0;
    std::vector<WallHit> hits;
    ForceTorque out = wall_kernel(body.shape.vertices(), ctx,
                                  std::cos(state.pose.theta),
                                  std::sin(state.pose.theta),
                                  {state.pose.x, state.pose.y}, state.velocity,
                                  state.omega, max_depth, hits);
    if (max_depth_out) *max_depth_out = max_depth;
    if (max_depth > kMaxPenetration) {
        throw ContactBlowupError(
            "wall penetration exceeds limit; check k_wall/c_wall/dt");
    }
    return out;
}

TiltOutcome simulate_tilt(const RigidBody& body, const Pose& start_pose,
                          const TiltAction& action, const FrictionField& field,
                          const Tray& tray, const SimParams& params,
                          std::ostream* trace) {
    action.validate();
    params.validate();
    if (!in_free_space(body, start_pose, tray)) {
        throw GeometryError("start pose is not in free space");
    }

    const std::vector<SupportPoint> supports =
        support_points(body.shape, params.n_support);
    const std::vector<Vec2>& verts_local = body.shape.vertices();

    const double sin_a = std::sin(action.tilt_angle);
    const double cos_a = std::cos(action.tilt_angle);
    const Vec2 g_accel = kTiltDirections[action.direction] * (params.g * sin_a);
    const FloorContext floor_ctx{body.mass, params.g * cos_a, params.v_stick};
    const WallContext wall_ctx{tray, params, body.mass, body.inertia};

    Vec2 pos{start_pose.x, start_pose.y};
    double theta = start_pose.theta;
    Vec2 vel{0.0, 0.0};
    double omega = 0.0;

    const double dt = params.dt;
    const double inv_m = 1.0 / body.mass;
    const double inv_i = 1.0 / body.inertia;
    const double settle_v2 = params.settle_v * params.settle_v;

    double t = 0.0;
    double hold = 0.0;
    double max_pen = 0.0;
    bool settled = false;
    std::vector<WallHit> hit_scratch;
    hit_scratch.reserve(4 * verts_local.size());

    if (trace) {
        *trace << "t,x,y,theta,vx,vy,omega,penetration\n";
    }

    while (t < params.max_sim_time) {
        const double c = std::cos(theta);
        const double s = std::sin(theta);

        Vec2 force = g_accel * body.mass;
        double torque = 0.0;

        const ForceTorque floor =
            floor_kernel(supports, field, floor_ctx, c, s, pos, vel, omega);
        force += floor.force;
        torque += floor.torque;

        double step_pen = 0.0;
        const ForceTorque wall = wall_kernel(verts_local, wall_ctx, c, s, pos,
                                             vel, omega, step_pen, hit_scratch);
        force += wall.force;
        torque += wall.torque;

        max_pen = std::max(max_pen, step_pen);
        if (step_pen > kMaxPenetration) {
            throw ContactBlowupError(
                "wall penetration exceeds limit; check k_wall/c_wall/dt");
        }

        vel += force * (dt * inv_m);
        omega += torque * (dt * inv_i);
        pos += vel * dt;
        theta += omega * dt;
        t += dt;

        if (!std::isfinite(pos.x) || !std::isfinite(pos.y) ||
            !std::isfinite(theta) || !std::isfinite(vel.x) ||
            !std::isfinite(vel.y) || !std::isfinite(omega)) {
            throw ContactBlowupError("integrator state became non-finite");
        }

        if (trace) {
            char row[256];
            std::snprintf(row, sizeof(row),
                          "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                          t, pos.x, pos.y, theta, vel.x, vel.y, omega, step_pen);
            *trace << row;
        }

        if (vel.norm2() < settle_v2 && std::fabs(omega) < params.settle_w) {
            hold += dt;
            if (hold >= params.settle_hold - 0.5 * dt) {
                settled = true;
                break;
            }
        } else {
            hold = 0.0;
        }
    }

    // Zero-velocity projection back into the tray so the reported pose is in
    // free space even after penalty-contact penetration.
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    double push_left = 0.0, push_right = 0.0, push_down = 0.0, push_up = 0.0;
    for (const Vec2& v : verts_local) {
        const Vec2 w = rotate(v, c, s) + pos;
        push_right = std::max(push_right, kProjectionMargin - w.x);
        push_left = std::max(push_left, w.x - tray.a + kProjectionMargin);
        push_up = std::max(push_up, kProjectionMargin - w.y);
        push_down = std::max(push_down, w.y - tray.b + kProjectionMargin);
    }
    if (push_right > 0.0) pos.x += push_right;
    if (push_left > 0.0) pos.x -= push_left;
    if (push_up > 0.0) pos.y += push_up;
    if (push_down > 0.0) pos.y -= push_down;

    return TiltOutcome{Pose(pos.x, pos.y, theta), settled, t, max_pen};
}

}  // namespace traytilt
