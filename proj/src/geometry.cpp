#include "traytilt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "traytilt/rng.hpp"
#include <json.hpp>

namespace traytilt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAreaTol = 1e-12;  // m^2

// Proper segment intersection (shared endpoints excluded by the caller).
bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
        double v = (b - a).cross(c - a);
        if (v > 0) return 1;
        if (v < 0) return -1;
        return 0;
    };
    const int o1 = orient(p1, p2, q1);
    const int o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1);
    const int o4 = orient(q1, q2, p2);
    return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

bool is_simple_polygon(const std::vector<Vec2>& v) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t i2 = (i + 1) % n;
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t j2 = (j + 1) % n;
            if (j == i || j2 == i || j == i2) continue;  // adjacent edges share a vertex
            if (segments_cross(v[i], v[i2], v[j], v[j2])) return false;
        }
    }
    return true;
}

double signed_area(const std::vector<Vec2>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        acc += v[i].cross(v[(i + 1) % v.size()]);
    }
    return 0.5 * acc;
}

}  // namespace

Tray::Tray(double a_, double b_) : a(a_), b(b_) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw GeometryError("tray dimensions must be positive");
    }
}

double normalize_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;  // fmod can land exactly on 2*pi after the add
    return t;
}

double angle_distance(double t0, double t1) {
    double d = std::fabs(normalize_angle(t0) - normalize_angle(t1));
    return d > std::numbers::pi ? kTwoPi - d : d;
}

Pose::Pose(double x_, double y_, double theta_)
    : x(x_), y(y_), theta(normalize_angle(theta_)) {}

MassProperties compute_mass_properties(const std::vector<Vec2>& vertices,
                                       double density) {
    if (vertices.size() < 3) {
        throw GeometryError("polygon needs at least 3 vertices");
    }
    if (!(density > 0.0)) {
        throw GeometryError("density must be positive");
    }
    const double area = signed_area(vertices);
    if (area < 0.0) {
        throw GeometryError("polygon winding is clockwise; expected CCW");
    }
    if (area <= kAreaTol) {
        throw GeometryError("degenerate polygon (area below tolerance)");
    }
    if (!is_simple_polygon(vertices)) {
        throw GeometryError("polygon is self-intersecting");
    }

    // Green's-theorem accumulators; polar second moment taken about the
    // origin first, then shifted to the centroid by the parallel-axis rule.
    double cx = 0.0, cy = 0.0, jz = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = vertices[i];
        const Vec2 q = vertices[(i + 1) % n];
        const double w = p.cross(q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
        jz += w * (p.x * p.x + p.x * q.x + q.x * q.x +
                   p.y * p.y + p.y * q.y + q.y * q.y);
    }
    MassProperties mp;
    mp.mass = density * area;
    mp.com = Vec2{cx, cy} / (6.0 * area);
    const double jz_origin = jz / 12.0;  // area polar moment about origin
    mp.inertia = density * jz_origin - mp.mass * mp.com.norm2();
    if (!(mp.inertia > 0.0)) {
        throw GeometryError("non-positive inertia (degenerate outline)");
    }
    return mp;
}

PartShape::PartShape(std::string name, std::vector<Vec2> vertices, double density)
    : name_(std::move(name)), vertices_(std::move(vertices)), density_(density) {
    const MassProperties mp = compute_mass_properties(vertices_, density_);
    for (Vec2& v : vertices_) v -= mp.com;
    circumradius_ = 0.0;
    for (const Vec2& v : vertices_) {
        circumradius_ = std::max(circumradius_, v.norm());
    }
}

bool PartShape::contains(Vec2 p) const {
    // Crossing-number test against the +x ray.
    bool inside = false;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = vertices_[i];
        const Vec2 b = vertices_[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

RigidBody::RigidBody(PartShape s) : shape(std::move(s)) {
    const MassProperties mp =
        compute_mass_properties(shape.vertices(), shape.density());
    mass = mp.mass;
    inertia = mp.inertia;
}

const char* wall_name(Wall w) {
    switch (w) {
        case Wall::kLeft: return "left";
        case Wall::kRight: return "right";
        case Wall::kBottom: return "bottom";
        case Wall::kTop: return "top";
    }
    return "?";
}

void world_vertices(const PartShape& shape, const Pose& pose,
                    std::vector<Vec2>& out) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    const Vec2 t{pose.x, pose.y};
    out.resize(shape.vertices().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = rotate(shape.vertices()[i], c, s) + t;
    }
}

std::vector<Vec2> world_vertices(const RigidBody& body, const Pose& pose) {
    std::vector<Vec2> out;
    world_vertices(body.shape, pose, out);
    return out;
}

std::vector<Penetration> penetration_depths(const RigidBody& body,
                                            const Pose& pose,
                                            const Tray& tray) {
    std::vector<Penetration> hits;
    const std::vector<Vec2> verts = world_vertices(body, pose);
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const Vec2 v = verts[i];
        const int idx = static_cast<int>(i);
        if (v.x < 0.0) hits.push_back({idx, Wall::kLeft, -v.x});
        if (v.x > tray.a) hits.push_back({idx, Wall::kRight, v.x - tray.a});
        if (v.y < 0.0) hits.push_back({idx, Wall::kBottom, -v.y});
        if (v.y > tray.b) hits.push_back({idx, Wall::kTop, v.y - tray.b});
    }
    return hits;
}

bool in_free_space(const RigidBody& body, const Pose& pose, const Tray& tray) {
    return penetration_depths(body, pose, tray).empty();
}

PartShape load_shape(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw GeometryError("cannot open shape file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw GeometryError("bad shape file " + path.string() + ": " + e.what());
    }
    if (!j.contains("name") || !j.contains("density") || !j.contains("vertices")) {
        throw GeometryError("shape file missing name/density/vertices: " +
                            path.string());
    }
    std::vector<Vec2> verts;
    for (const auto& v : j.at("vertices")) {
        verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    }
    return PartShape(j.at("name").get<std::string>(), std::move(verts),
                     j.at("density").get<double>());
}

void save_shape(const std::string& name, const std::vector<Vec2>& outline,
                double density, const std::filesystem::path& path) {
    nlohmann::json j;
    j["name"] = name;
    j["density"] = density;
    auto& vs = j["vertices"] = nlohmann::json::array();
    for (const Vec2& v : outline) {
        vs.push_back({v.x, v.y});
    }
    std::ofstream out(path);
    if (!out) {
        throw GeometryError("cannot write shape file: " + path.string());
    }
    out << j.dump(2) << '\n';
}

PartShape allen_key_shape() {
    // Outline authored corner-origin; the constructor re-centers on the COM.
    // 5 mm steel sheet: 7800 kg/m^3 * 0.005 m.
    const double density = 7800.0 * 0.005;
    const std::vector<Vec2> outline = {
        {0.0000, 0.0000}, {0.0775, 0.0000}, {0.0775, 0.0100},
        {0.0100, 0.0100}, {0.0100, 0.0275}, {0.0000, 0.0275},
    };
    return PartShape("allen_key_l", outline, density);
}

PartShape triangle_shape(int index, std::uint64_t seed) {
    if (index < 1) throw GeometryError("triangle preset index is 1-based");
    CounterRng rng(substream_key(seed, Stream::kShapeGen,
                                 static_cast<std::uint64_t>(index)));
    const double density = 7800.0 * 0.005;
    for (int attempt = 0; attempt < 100000; ++attempt) {
        std::vector<Vec2> v(3);
        for (Vec2& p : v) {
            p.x = rng.uniform(-0.05, 0.05);
            p.y = rng.uniform(-0.05, 0.05);
        }
        double area = signed_area(v);
        if (area < 0.0) {
            std::swap(v[1], v[2]);
            area = -area;
        }
        if (area < 8e-4 || area > 2.5e-3) continue;

        double max_side = 0.0;
        double min_angle = kTwoPi;
        bool ok = true;
        for (int i = 0; i < 3; ++i) {
            const Vec2 e1 = v[(i + 1) % 3] - v[i];
            const Vec2 e2 = v[(i + 2) % 3] - v[i];
            max_side = std::max(max_side, e1.norm());
            const double denom = e1.norm() * e2.norm();
            if (denom <= 0.0) {
                ok = false;
                break;
            }
            min_angle = std::min(
                min_angle, std::acos(std::clamp(e1.dot(e2) / denom, -1.0, 1.0)));
        }
        if (!ok || max_side > 0.11) continue;
        if (min_angle < 20.0 * std::numbers::pi / 180.0) continue;

        char name[16];
        std::snprintf(name, sizeof(name), "tri_%02d", index);
        return PartShape(name, std::move(v), density);
    }
    throw GeometryError("triangle preset sampling did not converge");
}

}  // namespace traytilt
