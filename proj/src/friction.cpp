#include "traytilt/friction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "traytilt/rng.hpp"
#include <json.hpp>

namespace traytilt {

// Class amplitudes are calibrated against the 30-degree tilt: medium keeps
// the whole field below tan(30), high crosses it so basin-scale patches can
// hold a resting part in place. That yields the convergent / slow /
// non-convergent split the classes are meant to produce.
double noise_amplitude(NoiseLevel level) {
    switch (level) {
        case NoiseLevel::kUniform: return 0.0;
        case NoiseLevel::kLow: return 0.03;
        case NoiseLevel::kMedium: return 0.35;
        case NoiseLevel::kHigh: return 0.50;
    }
    throw std::invalid_argument("unknown noise level");
}

const char* noise_level_name(NoiseLevel level) {
    switch (level) {
        case NoiseLevel::kUniform: return "uniform";
        case NoiseLevel::kLow: return "low";
        case NoiseLevel::kMedium: return "medium";
        case NoiseLevel::kHigh: return "high";
    }
    return "?";
}

NoiseLevel parse_noise_level(const std::string& name) {
    if (name == "uniform") return NoiseLevel::kUniform;
    if (name == "low") return NoiseLevel::kLow;
    if (name == "medium") return NoiseLevel::kMedium;
    if (name == "high") return NoiseLevel::kHigh;
    throw std::invalid_argument("unknown noise level: " + name);
}

FrictionField FrictionField::generate(double mu0, double amplitude, int grid_n,
                                      std::uint64_t seed, const Tray& tray) {
    if (!(mu0 > 0.0)) throw std::invalid_argument("mu0 must be positive");
    if (amplitude < 0.0) throw std::invalid_argument("amplitude must be >= 0");
    if (grid_n < 2) throw std::invalid_argument("grid_n must be >= 2");

    FrictionField f;
    f.mu0_ = mu0;
    f.amplitude_ = amplitude;
    f.grid_n_ = grid_n;
    f.seed_ = seed;
    f.tray_ = tray;
    f.clamped_ = mu0 - amplitude < kMuFloor;
    f.nodes_.resize(std::size_t(grid_n) * grid_n);
    for (int j = 0; j < grid_n; ++j) {
        for (int i = 0; i < grid_n; ++i) {
            const std::uint64_t node_index =
                std::uint64_t(j) * std::uint64_t(grid_n) + std::uint64_t(i);
            CounterRng rng(substream_key(seed, Stream::kFieldNode, node_index));
            const double mu = mu0 + rng.uniform(-amplitude, amplitude);
            f.nodes_[node_index] = std::max(mu, kMuFloor);
        }
    }
    f.inv_dx_ = (grid_n - 1) / tray.a;
    f.inv_dy_ = (grid_n - 1) / tray.b;
    return f;
}

double FrictionField::mu_at(Vec2 p) const {
    const double x = std::clamp(p.x, 0.0, tray_.a);
    const double y = std::clamp(p.y, 0.0, tray_.b);
    double u = x * inv_dx_;
    double v = y * inv_dy_;
    int i = std::min(static_cast<int>(u), grid_n_ - 2);
    int j = std::min(static_cast<int>(v), grid_n_ - 2);
    u -= i;
    v -= j;
    const double* row0 = nodes_.data() + std::size_t(j) * grid_n_ + i;
    const double* row1 = row0 + grid_n_;
    const double top = row0[0] + u * (row0[1] - row0[0]);
    const double bot = row1[0] + u * (row1[1] - row1[0]);
    return top + v * (bot - top);
}

FrictionField FrictionField::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open friction field file: " +
                                 path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad friction field file " + path.string() +
                                 ": " + e.what());
    }
    FrictionField f;
    f.mu0_ = j.at("mu0").get<double>();
    f.amplitude_ = j.at("amplitude").get<double>();
    f.grid_n_ = j.at("grid_n").get<int>();
    f.seed_ = j.at("seed").get<std::uint64_t>();
    f.tray_ = Tray(j.at("tray").at("a").get<double>(),
                   j.at("tray").at("b").get<double>());
    f.nodes_ = j.at("nodes").get<std::vector<double>>();
    if (f.grid_n_ < 2 ||
        f.nodes_.size() != std::size_t(f.grid_n_) * std::size_t(f.grid_n_)) {
        throw std::runtime_error("friction field node grid size mismatch: " +
                                 path.string());
    }
    f.clamped_ = f.mu0_ - f.amplitude_ < kMuFloor;
    f.inv_dx_ = (f.grid_n_ - 1) / f.tray_.a;
    f.inv_dy_ = (f.grid_n_ - 1) / f.tray_.b;
    return f;
}

void FrictionField::save(const std::filesystem::path& path) const {
    nlohmann::json j;
    j["mu0"] = mu0_;
    j["amplitude"] = amplitude_;
    j["grid_n"] = grid_n_;
    j["seed"] = seed_;
    j["tray"] = {{"a", tray_.a}, {"b", tray_.b}};
    j["nodes"] = nodes_;
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write friction field file: " +
                                 path.string());
    }
    out << j.dump(2) << '\n';
}

}  // namespace traytilt
