#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "traytilt/geometry.hpp"
#include "traytilt/vec2.hpp"

namespace traytilt {

/// Floor friction never drops below this, however large the noise amplitude.
inline constexpr double kMuFloor = 0.01;

/// Noise classes for spatially varying floor friction. Amplitudes are the
/// defaults used by the shipped study recipes; any amplitude can be set
/// directly in config.
enum class NoiseLevel { kUniform, kLow, kMedium, kHigh };

double noise_amplitude(NoiseLevel level);
const char* noise_level_name(NoiseLevel level);
NoiseLevel parse_noise_level(const std::string& name);

/// Spatially varying floor friction coefficient over the tray interior.
/// Node values live on an n x n lattice spanning [0,a] x [0,b] and are
/// bilinearly interpolated in between, so the field is continuous.
class FrictionField {
public:
    /// Deterministic generation: node (i,j) is perturbed by a counter-based
    /// draw keyed on (seed, node index), i.i.d. uniform in [-amplitude,
    /// +amplitude], clamped at kMuFloor. Generation order never matters.
    static FrictionField generate(double mu0, double amplitude, int grid_n,
                                  std::uint64_t seed, const Tray& tray);

    double mu0() const { return mu0_; }
    double amplitude() const { return amplitude_; }
    int grid_n() const { return grid_n_; }
    std::uint64_t seed() const { return seed_; }
    const Tray& tray() const { return tray_; }
    const std::vector<double>& nodes() const { return nodes_; }
    double node(int i, int j) const { return nodes_[std::size_t(j) * grid_n_ + i]; }

    /// True when generation had to clamp (mu0 - amplitude < kMuFloor).
    bool clamped() const { return clamped_; }

    /// Bilinear interpolation at p; queries outside the tray are clamped to
    /// the boundary.
    double mu_at(Vec2 p) const;

    /// Field file I/O: JSON with mu0, amplitude, grid_n, seed, tray, and the
    /// full node grid, so archived runs do not depend on generator stability.
    static FrictionField load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

private:
    FrictionField() = default;

    double mu0_ = 0.0;
    double amplitude_ = 0.0;
    int grid_n_ = 0;
    std::uint64_t seed_ = 0;
    Tray tray_;
    std::vector<double> nodes_;  // row-major, index j*grid_n + i
    bool clamped_ = false;
    double inv_dx_ = 0.0;
    double inv_dy_ = 0.0;
};

}  // namespace traytilt
