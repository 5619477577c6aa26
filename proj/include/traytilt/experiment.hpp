#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "traytilt/dynamics.hpp"
#include "traytilt/entropy.hpp"
#include "traytilt/friction.hpp"
#include "traytilt/geometry.hpp"
#include "traytilt/rng.hpp"

namespace traytilt {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by run_experiment when more than 1% of trials fail.
class FailureBudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ActionSequence {
    std::vector<TiltAction> actions;
    std::uint64_t seed = 0;
};

/// N i.i.d. uniform draws over the eight tilt directions; deterministic in
/// (n, seed). All actions share the given tilt angle.
ActionSequence generate_sequence(int n, std::uint64_t seed,
                                 double tilt_angle = 0.5235987755982988);

/// Sequence file I/O (JSON with n, seed, tilt_angle_deg, directions).
ActionSequence load_sequence(const std::filesystem::path& path);
void save_sequence(const ActionSequence& seq, const std::filesystem::path& path);

struct ExperimentConfig {
    std::string name;
    RigidBody body;
    Tray tray;
    int grid_alpha = 4;
    int grid_beta = 4;
    int grid_gamma = 4;
    ActionSequence sequence;
    int trials = 0;  // M
    FrictionField field;
    SimParams sim;
    std::uint64_t master_seed = 0;

    VoxelGrid voxel_grid() const {
        return VoxelGrid(tray, grid_alpha, grid_beta, grid_gamma);
    }
    void validate() const;
};

struct TrialRecord {
    int trial_index = 0;
    std::uint64_t seed = 0;
    std::vector<Pose> poses;           // N+1 poses, initial first
    std::vector<std::uint8_t> settled; // N flags, one per tilt
    std::vector<double> sim_times;     // N per-tilt simulated seconds
    double max_penetration = 0.0;
    bool failed = false;
    std::string error;
};

/// Rejection sampling of a uniform free-space pose: draw (x, y, theta)
/// uniform over the tray cross [0, 2*pi) until the part clears the walls.
/// Throws ConfigError after 10,000 consecutive rejections.
Pose sample_initial_pose(const RigidBody& body, const Tray& tray,
                         CounterRng& rng);

/// One trial: a trial-local generator is derived from (master seed, trial
/// index), the initial pose is sampled, and each action in the sequence is
/// simulated in order. Pure function of (config, trial_index); simulation
/// errors are captured in the record rather than thrown.
TrialRecord run_trial(const ExperimentConfig& config, int trial_index);

struct ExperimentResult {
    std::vector<TrialRecord> records;       // all M, failures flagged
    EntropyTrend trend;                     // H^0..H^N over successful trials
    std::vector<double> settled_fraction;   // per step; step 0 is 1.0
    int failures = 0;
    double max_penetration = 0.0;
};

/// Run all M trials (parallel across a worker pool; workers == 0 picks the
/// hardware count) and compute the per-step entropy trend. Output is a pure
/// function of the config — identical for any worker count. Throws
/// FailureBudgetError when more than 1% of trials fail.
ExperimentResult run_experiment(const ExperimentConfig& config, int workers = 0);

/// First step index i such that H^j <= threshold for every j >= i (sustained
/// convergence); nullopt if the trend never stays below the threshold.
std::optional<int> convergence_index(std::span<const double> h_bits,
                                     double threshold_bits);

struct AggregateTrend {
    std::vector<double> mean;
    std::vector<double> q25;
    std::vector<double> q75;
    std::vector<std::optional<int>> convergence;  // per input trend
};

/// Per-step mean and quartiles across a family of equal-length trends.
/// Percentiles use linear interpolation between closest ranks: for n sorted
/// values the p-quantile sits at fractional rank p*(n-1).
AggregateTrend aggregate_trends(const std::vector<std::vector<double>>& trends,
                                double convergence_threshold_bits = 0.0);

}  // namespace traytilt
