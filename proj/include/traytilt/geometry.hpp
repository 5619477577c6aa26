#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "traytilt/vec2.hpp"

namespace traytilt {

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Axis-aligned rectangular tray interior [0,a] x [0,b], meters.
struct Tray {
    double a = 0.2;
    double b = 0.2;

    Tray() = default;
    Tray(double a_, double b_);
};

/// Part pose: center-of-mass position in the tray frame plus heading.
/// theta is always stored normalized to [0, 2*pi).
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Pose() = default;
    Pose(double x_, double y_, double theta_);
};

/// Wrap an angle into [0, 2*pi).
double normalize_angle(double theta);

/// Circular distance between two angles, in [0, pi].
double angle_distance(double t0, double t1);

struct MassProperties {
    double mass = 0.0;      // kg
    Vec2 com;               // area centroid of the input outline
    double inertia = 0.0;   // kg m^2 about the centroid, out-of-plane axis
};

/// Green's-theorem integrals over a simple CCW polygon.
/// Throws GeometryError on degenerate (area <= 1e-12 m^2), self-intersecting,
/// clockwise, or under-sized outlines.
MassProperties compute_mass_properties(const std::vector<Vec2>& vertices,
                                       double density);

/// Simple polygon in the body frame. The constructor validates the outline
/// and re-centers it so the body-frame origin is the center of mass.
class PartShape {
public:
    PartShape(std::string name, std::vector<Vec2> vertices, double density);

    const std::string& name() const { return name_; }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    double density() const { return density_; }

    /// Largest |vertex| after COM centering.
    double circumradius() const { return circumradius_; }

    /// Point-in-polygon test (crossing number); boundary points may land on
    /// either side. Works for non-convex outlines.
    bool contains(Vec2 p) const;

private:
    std::string name_;
    std::vector<Vec2> vertices_;
    double density_ = 0.0;
    double circumradius_ = 0.0;
};

/// Shape plus its closed-form mass properties at the stated density.
struct RigidBody {
    PartShape shape;
    double mass = 0.0;
    double inertia = 0.0;

    explicit RigidBody(PartShape s);
};

enum class Wall : int { kLeft = 0, kRight = 1, kBottom = 2, kTop = 3 };

const char* wall_name(Wall w);

struct Penetration {
    int vertex = 0;
    Wall wall = Wall::kLeft;
    double depth = 0.0;  // meters, > 0
};

/// Body vertices rotated by pose.theta and translated by (pose.x, pose.y).
std::vector<Vec2> world_vertices(const RigidBody& body, const Pose& pose);
void world_vertices(const PartShape& shape, const Pose& pose,
                    std::vector<Vec2>& out);

/// Every (vertex, wall) pair with positive penetration depth. Empty when the
/// part is fully inside the tray. A vertex outside a corner reports two
/// entries. Tray convexity makes vertex-vs-wall checks complete.
std::vector<Penetration> penetration_depths(const RigidBody& body,
                                            const Pose& pose, const Tray& tray);

/// True iff penetration_depths(...) is empty (boundary contact counts as free).
bool in_free_space(const RigidBody& body, const Pose& pose, const Tray& tray);

/// Shape file I/O. JSON document with fields name, density, vertices
/// ([ [x,y], ... ] in meters, outline as authored; centering happens at load).
PartShape load_shape(const std::filesystem::path& path);
void save_shape(const std::string& name, const std::vector<Vec2>& outline,
                double density, const std::filesystem::path& path);

/// The L-shaped key preset: two fused rectangles, 77.5 x 10 mm along the
/// long arm and 10 x 27.5 mm along the short arm, 5 mm steel areal density.
PartShape allen_key_shape();

/// Procedural triangle preset k (1-based). Deterministic in (seed, k):
/// rejection-samples vertices in a 100 mm box until the triangle has
/// area in [8, 25] cm^2, minimum interior angle >= 20 degrees, and longest
/// side <= 110 mm. Same density as the L-key preset.
PartShape triangle_shape(int index, std::uint64_t seed);

/// Seed used for the shipped tri_01..tri_15 presets.
inline constexpr std::uint64_t kTrianglePresetSeed = 1905;

}  // namespace traytilt
