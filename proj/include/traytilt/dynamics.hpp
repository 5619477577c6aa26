#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "traytilt/friction.hpp"
#include "traytilt/geometry.hpp"

namespace traytilt {

/// Raised when contact penetration exceeds the hard limit or the integrator
/// state stops being finite. Signals a bad stiffness/timestep combination.
class ContactBlowupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hard cap on wall penetration before the simulation aborts.
inline constexpr double kMaxPenetration = 2e-3;  // m

/// The eight tilt headings, k * 45 degrees counter-clockwise from +x.
/// The direction is the downhill direction of the tilted floor: the part
/// accelerates along it.
extern const Vec2 kTiltDirections[8];

struct TiltAction {
    int direction = 0;              // index into kTiltDirections
    double tilt_angle = 0.5235987755982988;  // 30 degrees

    void validate() const;
};

/// Integrator state: COM pose plus tray-frame velocities.
struct BodyState {
    Pose pose;
    Vec2 velocity;
    double omega = 0.0;  // rad/s
};

struct SimParams {
    double dt = 2e-4;          // s
    double g = 9.81;           // m/s^2
    double k_wall = 2e4;       // N/m
    double c_wall = 20.0;      // N s/m, near-critical for the preset parts
    double mu_wall = 0.25;
    double v_stick = 1e-3;     // m/s, stick-slip velocity threshold
    int n_support = 6;         // support grid resolution over the shape bbox
    double settle_v = 9e-4;    // m/s
    double settle_w = 0.05;    // rad/s
    double settle_hold = 0.08; // s below thresholds before declaring rest
    double max_sim_time = 5.0; // s of simulated time per tilt

    void validate() const;
};

struct TiltOutcome {
    Pose settled_pose;
    bool settled = false;
    double sim_time = 0.0;
    double max_penetration = 0.0;
};

/// One floor support sample: body-frame point and its share of the normal
/// load. Shares are equal and sum to 1.
struct SupportPoint {
    Vec2 point;
    double share = 0.0;
};

/// Regular grid sample of the polygon interior over its bounding box
/// (n_support x n_support cell centers, point-in-polygon filtered). If fewer
/// than 3 samples land inside, the grid is refined x2 and x4 before giving up.
std::vector<SupportPoint> support_points(const PartShape& shape, int n_support);

struct ForceTorque {
    Vec2 force;
    double torque = 0.0;
};

/// Distributed stick-slip floor friction. Per support point with world
/// velocity v: kinetic Coulomb -mu N v/|v| above the stick threshold,
/// regularized -mu N v/v_stick below it. N is the point's share of
/// m g cos(tilt_angle).
ForceTorque floor_friction(const RigidBody& body, const BodyState& state,
                           std::span<const SupportPoint> supports,
                           const FrictionField& field, const TiltAction& action,
                           const SimParams& params);

/// Spring-damper wall contact on penetrating vertices: normal force
/// k*depth + c*max(0, approach speed), never tensile, plus Coulomb wall
/// friction on the normal magnitude with the same stick regularization.
/// max_depth_out (optional) receives the deepest penetration seen.
ForceTorque wall_forces(const RigidBody& body, const BodyState& state,
                        const Tray& tray, const SimParams& params,
                        double* max_depth_out = nullptr);

/// Simulate one tilt episode to quiescence in the tray-fixed frame:
/// semi-implicit Euler with in-plane gravity g sin(tilt_angle) along the
/// action direction. Terminates once speeds stay below the settle thresholds
/// for settle_hold seconds; otherwise runs out max_sim_time with
/// settled=false. The returned pose is projected into free space. Pure
/// function of its arguments.
///
/// `trace`, when set, receives one CSV row per step:
/// t,x,y,theta,vx,vy,omega,penetration.
TiltOutcome simulate_tilt(const RigidBody& body, const Pose& start_pose,
                          const TiltAction& action, const FrictionField& field,
                          const Tray& tray, const SimParams& params,
                          std::ostream* trace = nullptr);

}  // namespace traytilt
