#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "traytilt/entropy.hpp"
#include "traytilt/experiment.hpp"

namespace traytilt {

/// 17-significant-digit decimal formatting; round-trips IEEE doubles
/// losslessly so determinism extends through result files.
std::string fmt17(double v);

/// Rectangular pose log: trial-major, each trial holding N+1 poses and N+1
/// settled flags (step 0 is always 1).
struct PoseLog {
    std::vector<std::vector<Pose>> poses;
    std::vector<std::vector<std::uint8_t>> settled;

    int steps() const {
        return poses.empty() ? 0 : static_cast<int>(poses.front().size()) - 1;
    }
};

/// Entropy trend plus bookkeeping columns, one entry per step 0..N.
struct TrendData {
    std::vector<double> h_bits;
    std::vector<int> occupied;
    std::vector<double> settled_fraction;
};

/// Per-step histograms and entropies for a pose log. Both the simulation
/// driver and the standalone entropy command route through this one
/// function, so their outputs agree bit for bit.
TrendData compute_trend(const PoseLog& log, const VoxelGrid& grid);

/// Successful trials of an experiment result as a pose log.
PoseLog pose_log_from_records(const std::vector<TrialRecord>& records);

void write_trend_csv(const std::filesystem::path& path, const TrendData& trend);
void write_trials_csv(const std::filesystem::path& path, const PoseLog& log);
void write_aggregate_csv(const std::filesystem::path& path,
                         const AggregateTrend& agg);

/// Reads trial,step,x,y,theta[,settled] CSV. Requires a header row and a
/// rectangular layout (every trial covering steps 0..N exactly once, in
/// order). A missing settled column reads as all-settled.
PoseLog read_poses_csv(const std::filesystem::path& path);

/// Reads the H_bits column of a trend.csv written by write_trend_csv.
std::vector<double> read_trend_h_bits(const std::filesystem::path& path);

}  // namespace traytilt
