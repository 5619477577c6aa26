#include "traytilt/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

namespace traytilt {

namespace {
constexpr int kRejectionCap = 10000;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

ActionSequence generate_sequence(int n, std::uint64_t seed, double tilt_angle) {
    if (n < 1) {
        throw std::invalid_argument("sequence length must be >= 1");
    }
    CounterRng rng(substream_key(seed, Stream::kSequence, 0));
    ActionSequence seq;
    seq.seed = seed;
    seq.actions.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        TiltAction a;
        a.direction = static_cast<int>(rng.below(8));
        a.tilt_angle = tilt_angle;
        seq.actions.push_back(a);
    }
    return seq;
}

ActionSequence load_sequence(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open sequence file: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad sequence file " + path.string() + ": " + e.what());
    }
    ActionSequence seq;
    seq.seed = j.value("seed", std::uint64_t{0});
    const double tilt_angle =
        j.value("tilt_angle_deg", 30.0) * std::numbers::pi / 180.0;
    for (const auto& d : j.at("directions")) {
        TiltAction a;
        a.direction = d.get<int>();
        a.tilt_angle = tilt_angle;
        a.validate();
        seq.actions.push_back(a);
    }
    if (seq.actions.empty()) {
        throw ConfigError("sequence file has no actions: " + path.string());
    }
    return seq;
}

void save_sequence(const ActionSequence& seq, const std::filesystem::path& path) {
    nlohmann::json j;
    j["seed"] = seq.seed;
    j["n"] = seq.actions.size();
    j["tilt_angle_deg"] =
        seq.actions.empty() ? 30.0
                            : seq.actions.front().tilt_angle * 180.0 / std::numbers::pi;
    auto& dirs = j["directions"] = nlohmann::json::array();
    for (const TiltAction& a : seq.actions) dirs.push_back(a.direction);
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write sequence file: " + path.string());
    }
    out << j.dump(2) << '\n';
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw ConfigError("trial count M must be >= 1");
    if (sequence.actions.empty()) throw ConfigError("empty action sequence");
    for (const TiltAction& a : sequence.actions) a.validate();
    sim.validate();
    voxel_grid();  // throws on a bad grid spec

    // Fast-fail only clear impossibilities; borderline fits are left to the
    // rejection-sampling cap.
    double diameter = 0.0;
    const auto& vs = body.shape.vertices();
    for (std::size_t i = 0; i < vs.size(); ++i) {
        for (std::size_t j = i + 1; j < vs.size(); ++j) {
            diameter = std::max(diameter, (vs[i] - vs[j]).norm());
        }
    }
    if (diameter > std::hypot(tray.a, tray.b)) {
        throw ConfigError("part is larger than the tray diagonal");
    }
}

Pose sample_initial_pose(const RigidBody& body, const Tray& tray,
                         CounterRng& rng) {
    for (int i = 0; i < kRejectionCap; ++i) {
        const Pose pose(rng.uniform(0.0, tray.a), rng.uniform(0.0, tray.b),
                        rng.uniform(0.0, kTwoPi));
        if (in_free_space(body, pose, tray)) return pose;
    }
    throw ConfigError(
        "no free-space pose found in 10000 draws; part too large for tray?");
}

TrialRecord run_trial(const ExperimentConfig& config, int trial_index) {
    TrialRecord rec;
    rec.trial_index = trial_index;
    rec.seed = substream_key(config.master_seed, Stream::kTrial,
                             std::uint64_t(trial_index));
    CounterRng rng(rec.seed);
    try {
        Pose pose = sample_initial_pose(config.body, config.tray, rng);
        rec.poses.push_back(pose);
        for (const TiltAction& action : config.sequence.actions) {
            const TiltOutcome out = simulate_tilt(config.body, pose, action,
                                                  config.field, config.tray,
                                                  config.sim);
            pose = out.settled_pose;
            rec.poses.push_back(pose);
            rec.settled.push_back(out.settled ? 1 : 0);
            rec.sim_times.push_back(out.sim_time);
            rec.max_penetration = std::max(rec.max_penetration,
                                           out.max_penetration);
        }
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = "trial " + std::to_string(trial_index) + ": " + e.what();
    }
    return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int workers) {
    config.validate();
    const int m = config.trials;
    if (workers <= 0) {
        workers = static_cast<int>(std::thread::hardware_concurrency());
        if (workers < 1) workers = 1;
    }
    workers = std::min(workers, m);

    ExperimentResult result;
    result.records.resize(std::size_t(m));

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < m; i = next.fetch_add(1)) {
            result.records[std::size_t(i)] = run_trial(config, i);
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(std::size_t(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    for (const TrialRecord& rec : result.records) {
        if (rec.failed) ++result.failures;
        result.max_penetration =
            std::max(result.max_penetration, rec.max_penetration);
    }
    if (result.failures * 100 > m) {
        std::string first;
        for (const TrialRecord& rec : result.records) {
            if (rec.failed) {
                first = rec.error;
                break;
            }
        }
        throw FailureBudgetError(std::to_string(result.failures) + " of " +
                                 std::to_string(m) +
                                 " trials failed (budget 1%); first: " + first);
    }

    const VoxelGrid grid = config.voxel_grid();
    const int n_steps = static_cast<int>(config.sequence.actions.size());
    for (int step = 0; step <= n_steps; ++step) {
        PoseHistogram hist(grid);
        std::int64_t settled_count = 0;
        std::int64_t used = 0;
        for (const TrialRecord& rec : result.records) {
            if (rec.failed) continue;
            hist.add(rec.poses[std::size_t(step)]);
            ++used;
            if (step == 0 || rec.settled[std::size_t(step - 1)]) ++settled_count;
        }
        result.trend.h_bits.push_back(entropy_bits(hist));
        result.trend.occupied.push_back(hist.occupied());
        result.settled_fraction.push_back(
            static_cast<double>(settled_count) / static_cast<double>(used));
    }
    return result;
}

std::optional<int> convergence_index(std::span<const double> h_bits,
                                     double threshold_bits) {
    std::optional<int> candidate;
    for (std::size_t i = 0; i < h_bits.size(); ++i) {
        if (h_bits[i] <= threshold_bits) {
            if (!candidate) candidate = static_cast<int>(i);
        } else {
            candidate.reset();
        }
    }
    return candidate;
}

AggregateTrend aggregate_trends(const std::vector<std::vector<double>>& trends,
                                double convergence_threshold_bits) {
    if (trends.empty()) {
        throw std::invalid_argument("aggregate_trends needs at least one trend");
    }
    const std::size_t len = trends.front().size();
    for (const auto& t : trends) {
        if (t.size() != len) {
            throw std::invalid_argument("trend length mismatch");
        }
    }

    // Linear interpolation between closest ranks: quantile p sits at
    // fractional rank p*(n-1) of the sorted values.
    const auto quantile = [](std::vector<double>& sorted, double p) {
        const double rank = p * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(rank);
        const double frac = rank - static_cast<double>(lo);
        if (lo + 1 >= sorted.size()) return sorted.back();
        return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
    };

    AggregateTrend agg;
    std::vector<double> column(trends.size());
    for (std::size_t step = 0; step < len; ++step) {
        double sum = 0.0;
        for (std::size_t k = 0; k < trends.size(); ++k) {
            column[k] = trends[k][step];
            sum += column[k];
        }
        std::sort(column.begin(), column.end());
        agg.mean.push_back(sum / static_cast<double>(trends.size()));
        agg.q25.push_back(quantile(column, 0.25));
        agg.q75.push_back(quantile(column, 0.75));
    }
    for (const auto& t : trends) {
        agg.convergence.push_back(
            convergence_index(t, convergence_threshold_bits));
    }
    return agg;
}

}  // namespace traytilt
