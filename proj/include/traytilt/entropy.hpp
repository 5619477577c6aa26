#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "traytilt/geometry.hpp"

namespace traytilt {

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform discretization of the pose space [0,a] x [0,b] x [0,2*pi) into
/// alpha x beta x gamma voxels. The positional resolution eps_p is shared by
/// both axes, so a/alpha must equal b/beta.
class VoxelGrid {
public:
    VoxelGrid(const Tray& tray, int alpha, int beta, int gamma);

    const Tray& tray() const { return tray_; }
    int alpha() const { return alpha_; }
    int beta() const { return beta_; }
    int gamma() const { return gamma_; }
    int total_voxels() const { return alpha_ * beta_ * gamma_; }
    double eps_p() const { return eps_p_; }
    double eps_r() const { return eps_r_; }

    /// Half-open bins with top-edge clamping: j = min(floor(x/eps_p),
    /// alpha-1), likewise for y; theta is normalized to [0, 2*pi) first.
    /// Throws DomainError when (x, y) lies outside the tray.
    int voxel_index(const Pose& pose) const;

private:
    Tray tray_;
    int alpha_ = 0;
    int beta_ = 0;
    int gamma_ = 0;
    double eps_p_ = 0.0;
    double eps_r_ = 0.0;
};

/// Per-voxel occupancy counts for M poses; counts sum to M.
struct PoseHistogram {
    VoxelGrid grid;
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;

    explicit PoseHistogram(const VoxelGrid& g)
        : grid(g), counts(std::size_t(g.total_voxels()), 0) {}

    void add(const Pose& pose) {
        ++counts[std::size_t(grid.voxel_index(pose))];
        ++total;
    }

    /// Merge of per-worker partial counts (associative, order-independent).
    void merge(const PoseHistogram& other);

    int occupied() const;
};

/// Occupancy counts for the poses; throws DomainError on an empty list or on
/// any pose outside the tray.
PoseHistogram estimate_distribution(std::span<const Pose> poses,
                                    const VoxelGrid& grid);

/// Discrete Shannon entropy in bits, -sum f log2 f with 0 log 0 := 0.
double entropy_bits(const PoseHistogram& histogram);

/// Entropy of raw counts (sum must be positive).
double entropy_bits_counts(std::span<const std::int64_t> counts);

/// Entropy values H^0..H^N for one action sequence, plus the number of
/// occupied voxels at each step.
struct EntropyTrend {
    std::vector<double> h_bits;
    std::vector<int> occupied;
};

/// Trial-count sizing: the bin count K and trial count M are balanced when
/// K = 2 M^(1/3), i.e. M = (K/2)^3.
struct RiceRule {
    std::int64_t trials = 0;  // rounded to nearest
    double exact = 0.0;       // (K/2)^3 before rounding
};

RiceRule rice_rule_trials(std::int64_t total_voxels);

/// Monte Carlo mean of entropy_bits over `repetitions` histograms, each made
/// of `samples` i.i.d. uniform draws into `total_voxels` bins. Deterministic
/// in the seed. Quantifies the finite-sample bias of the entropy estimate.
double expected_finite_sample_entropy(std::int64_t samples,
                                      std::int64_t total_voxels,
                                      int repetitions, std::uint64_t seed);

}  // namespace traytilt
