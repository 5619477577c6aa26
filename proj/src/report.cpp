#include "traytilt/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace traytilt {

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw DomainError("bad " + what + " value: '" + s + "'");
    }
    return v;
}

long parse_long(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
        throw DomainError("bad " + what + " value: '" + s + "'");
    }
    return v;
}

}  // namespace

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

TrendData compute_trend(const PoseLog& log, const VoxelGrid& grid) {
    if (log.poses.empty()) {
        throw DomainError("pose log has no trials");
    }
    const std::size_t n_steps = log.poses.front().size();
    for (std::size_t t = 0; t < log.poses.size(); ++t) {
        if (log.poses[t].size() != n_steps ||
            log.settled[t].size() != n_steps) {
            throw DomainError("pose log is ragged");
        }
    }

    TrendData trend;
    const std::int64_t m = static_cast<std::int64_t>(log.poses.size());
    for (std::size_t step = 0; step < n_steps; ++step) {
        PoseHistogram hist(grid);
        std::int64_t settled_count = 0;
        for (std::size_t t = 0; t < log.poses.size(); ++t) {
            hist.add(log.poses[t][step]);
            if (log.settled[t][step]) ++settled_count;
        }
        trend.h_bits.push_back(entropy_bits(hist));
        trend.occupied.push_back(hist.occupied());
        trend.settled_fraction.push_back(static_cast<double>(settled_count) /
                                         static_cast<double>(m));
    }
    return trend;
}

PoseLog pose_log_from_records(const std::vector<TrialRecord>& records) {
    PoseLog log;
    for (const TrialRecord& rec : records) {
        if (rec.failed) continue;
        log.poses.push_back(rec.poses);
        std::vector<std::uint8_t> flags;
        flags.push_back(1);  // the sampled initial pose is at rest
        flags.insert(flags.end(), rec.settled.begin(), rec.settled.end());
        log.settled.push_back(std::move(flags));
    }
    return log;
}

void write_trend_csv(const std::filesystem::path& path, const TrendData& trend) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "step,H_bits,occupied,settled_fraction\n";
    for (std::size_t i = 0; i < trend.h_bits.size(); ++i) {
        out << i << ',' << fmt17(trend.h_bits[i]) << ',' << trend.occupied[i]
            << ',' << fmt17(trend.settled_fraction[i]) << '\n';
    }
}

void write_trials_csv(const std::filesystem::path& path, const PoseLog& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "trial,step,x,y,theta,settled\n";
    for (std::size_t t = 0; t < log.poses.size(); ++t) {
        for (std::size_t s = 0; s < log.poses[t].size(); ++s) {
            const Pose& p = log.poses[t][s];
            out << t << ',' << s << ',' << fmt17(p.x) << ',' << fmt17(p.y)
                << ',' << fmt17(p.theta) << ','
                << static_cast<int>(log.settled[t][s]) << '\n';
        }
    }
}

void write_aggregate_csv(const std::filesystem::path& path,
                         const AggregateTrend& agg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "step,mean_H,q25,q75\n";
    for (std::size_t i = 0; i < agg.mean.size(); ++i) {
        out << i << ',' << fmt17(agg.mean[i]) << ',' << fmt17(agg.q25[i]) << ','
            << fmt17(agg.q75[i]) << '\n';
    }
}

PoseLog read_poses_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) {
        throw DomainError("empty pose CSV: " + path.string());
    }
    const auto header = split_csv_line(line);
    bool has_settled = false;
    if (header.size() == 6 && header[5] == "settled") {
        has_settled = true;
    } else if (header.size() != 5) {
        throw DomainError(
            "expected header trial,step,x,y,theta[,settled] in " +
            path.string());
    }
    for (int c = 0; c < 5; ++c) {
        static const char* kNames[5] = {"trial", "step", "x", "y", "theta"};
        if (header[std::size_t(c)] != kNames[c]) {
            throw DomainError(
                "expected header trial,step,x,y,theta[,settled] in " +
                path.string());
        }
    }

    PoseLog log;
    long expected_trial = 0;
    long expected_step = 0;
    long steps_per_trial = -1;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != (has_settled ? 6u : 5u)) {
            throw DomainError("bad column count at line " +
                              std::to_string(line_no) + " of " + path.string());
        }
        const long trial = parse_long(f[0], "trial");
        const long step = parse_long(f[1], "step");
        if (trial == expected_trial + 1 && step == 0) {
            // next trial begins; check the finished one for raggedness
            if (steps_per_trial < 0) {
                steps_per_trial = expected_step;
            } else if (expected_step != steps_per_trial) {
                throw DomainError("ragged pose CSV (trial " +
                                  std::to_string(expected_trial) + " has " +
                                  std::to_string(expected_step) + " steps): " +
                                  path.string());
            }
            expected_trial = trial;
            expected_step = 0;
        }
        if (trial != expected_trial || step != expected_step) {
            throw DomainError("unexpected trial/step order at line " +
                              std::to_string(line_no) + " of " + path.string());
        }
        if (step == 0) {
            log.poses.emplace_back();
            log.settled.emplace_back();
        }
        const double x = parse_double(f[2], "x");
        const double y = parse_double(f[3], "y");
        const double theta = parse_double(f[4], "theta");
        const std::uint8_t settled =
            has_settled ? static_cast<std::uint8_t>(parse_long(f[5], "settled") != 0)
                        : std::uint8_t{1};
        log.poses.back().push_back(Pose(x, y, theta));
        log.settled.back().push_back(settled);
        ++expected_step;
    }
    if (log.poses.empty()) {
        throw DomainError("pose CSV has no rows: " + path.string());
    }
    if (steps_per_trial >= 0 && expected_step != steps_per_trial) {
        throw DomainError("ragged pose CSV (last trial short): " + path.string());
    }
    return log;
}

std::vector<double> read_trend_h_bits(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line).size() < 2) {
        throw DomainError("bad trend CSV header: " + path.string());
    }
    std::vector<double> h;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() < 2) {
            throw DomainError("bad trend CSV row: " + path.string());
        }
        h.push_back(parse_double(f[1], "H_bits"));
    }
    if (h.empty()) throw DomainError("trend CSV has no rows: " + path.string());
    return h;
}

}  // namespace traytilt
