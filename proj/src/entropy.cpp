#include "traytilt/entropy.hpp"

#include <cmath>
#include <string>

#include "traytilt/rng.hpp"

namespace traytilt {

VoxelGrid::VoxelGrid(const Tray& tray, int alpha, int beta, int gamma)
    : tray_(tray), alpha_(alpha), beta_(beta), gamma_(gamma) {
    if (alpha < 1 || beta < 1 || gamma < 1) {
        throw std::invalid_argument("voxel grid bin counts must be >= 1");
    }
    eps_p_ = tray.a / alpha;
    const double eps_p_y = tray.b / beta;
    if (std::fabs(eps_p_ - eps_p_y) > 1e-9 * eps_p_) {
        throw std::invalid_argument(
            "positional resolution mismatch: a/alpha must equal b/beta");
    }
    eps_r_ = 2.0 * std::numbers::pi / gamma;
}

int VoxelGrid::voxel_index(const Pose& pose) const {
    if (pose.x < 0.0 || pose.x > tray_.a || pose.y < 0.0 || pose.y > tray_.b) {
        throw DomainError("pose (" + std::to_string(pose.x) + ", " +
                          std::to_string(pose.y) + ") outside tray");
    }
    const int j = std::min(static_cast<int>(pose.x / eps_p_), alpha_ - 1);
    const int k = std::min(static_cast<int>(pose.y / eps_p_), beta_ - 1);
    const int m =
        std::min(static_cast<int>(normalize_angle(pose.theta) / eps_r_),
                 gamma_ - 1);
    return (j * beta_ + k) * gamma_ + m;
}

void PoseHistogram::merge(const PoseHistogram& other) {
    if (other.counts.size() != counts.size()) {
        throw std::invalid_argument("histogram grids differ");
    }
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    total += other.total;
}

int PoseHistogram::occupied() const {
    int n = 0;
    for (std::int64_t c : counts) n += c > 0;
    return n;
}

PoseHistogram estimate_distribution(std::span<const Pose> poses,
                                    const VoxelGrid& grid) {
    if (poses.empty()) {
        throw DomainError("cannot estimate a distribution from zero poses");
    }
    PoseHistogram h(grid);
    for (const Pose& p : poses) h.add(p);
    return h;
}

double entropy_bits_counts(std::span<const std::int64_t> counts) {
    std::int64_t total = 0;
    for (std::int64_t c : counts) total += c;
    if (total <= 0) {
        throw DomainError("entropy of an empty histogram");
    }
    const double inv_m = 1.0 / static_cast<double>(total);
    double h = 0.0;
    for (std::int64_t c : counts) {
        if (c > 0) {
            const double f = static_cast<double>(c) * inv_m;
            h -= f * std::log2(f);
        }
    }
    return h;
}

double entropy_bits(const PoseHistogram& histogram) {
    return entropy_bits_counts(histogram.counts);
}

RiceRule rice_rule_trials(std::int64_t total_voxels) {
    if (total_voxels < 1) {
        throw std::invalid_argument("total_voxels must be >= 1");
    }
    RiceRule r;
    const double half = static_cast<double>(total_voxels) / 2.0;
    r.exact = half * half * half;
    r.trials = static_cast<std::int64_t>(std::llround(r.exact));
    return r;
}

double expected_finite_sample_entropy(std::int64_t samples,
                                      std::int64_t total_voxels,
                                      int repetitions, std::uint64_t seed) {
    if (samples < 1 || total_voxels < 1 || repetitions < 1) {
        throw std::invalid_argument(
            "samples, total_voxels and repetitions must be positive");
    }
    std::vector<std::int64_t> counts(static_cast<std::size_t>(total_voxels), 0);
    double acc = 0.0;
    for (int rep = 0; rep < repetitions; ++rep) {
        CounterRng rng(
            substream_key(seed, Stream::kEntropyMc, std::uint64_t(rep)));
        std::fill(counts.begin(), counts.end(), 0);
        for (std::int64_t i = 0; i < samples; ++i) {
            ++counts[rng.below(std::uint64_t(total_voxels))];
        }
        acc += entropy_bits_counts(counts);
    }
    return acc / repetitions;
}

}  // namespace traytilt
