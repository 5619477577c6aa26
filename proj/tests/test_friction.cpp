#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "traytilt/friction.hpp"
#include "traytilt/rng.hpp"

using namespace traytilt;

TEST_CASE("zero amplitude gives a constant field") {
    const Tray tray(0.2, 0.2);
    const FrictionField f = FrictionField::generate(0.3, 0.0, 8, 42, tray);
    CounterRng rng(substream_key(1, Stream::kProbe, 10));
    for (int i = 0; i < 1000; ++i) {
        const Vec2 p{rng.uniform(0, 0.2), rng.uniform(0, 0.2)};
        CHECK(f.mu_at(p) == doctest::Approx(0.3).epsilon(1e-15));
    }
}

TEST_CASE("generation is deterministic") {
    const Tray tray(0.2, 0.2);
    const FrictionField a = FrictionField::generate(0.3, 0.1, 8, 42, tray);
    const FrictionField b = FrictionField::generate(0.3, 0.1, 8, 42, tray);
    REQUIRE(a.nodes().size() == b.nodes().size());
    for (std::size_t i = 0; i < a.nodes().size(); ++i) {
        CHECK(a.nodes()[i] == b.nodes()[i]);  // bitwise
    }
}

TEST_CASE("empirical mean of interpolated samples stays near mu0") {
    const Tray tray(0.2, 0.2);
    const FrictionField f = FrictionField::generate(0.3, 0.1, 8, 42, tray);
    CounterRng rng(substream_key(2, Stream::kProbe, 11));
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        sum += f.mu_at({rng.uniform(0, 0.2), rng.uniform(0, 0.2)});
    }
    const double mean = sum / n;
    CHECK(mean > 0.27);
    CHECK(mean < 0.33);
}

TEST_CASE("node-mean stays within 3 amplitude/n of mu0") {
    const Tray tray(0.2, 0.2);
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        const FrictionField f = FrictionField::generate(0.3, 0.1, 8, seed, tray);
        double sum = 0.0;
        for (double v : f.nodes()) sum += v;
        const double mean = sum / static_cast<double>(f.nodes().size());
        const double bound = 3.0 * f.amplitude() / std::sqrt(64.0);
        CHECK(std::fabs(mean - 0.3) <= bound);
    }
}

TEST_CASE("interpolation identities") {
    const Tray tray(0.2, 0.2);
    const FrictionField f = FrictionField::generate(0.35, 0.08, 5, 7, tray);

    SUBCASE("query at a node returns the node value") {
        const double dx = tray.a / (f.grid_n() - 1);
        const double dy = tray.b / (f.grid_n() - 1);
        for (int j = 0; j < f.grid_n(); ++j) {
            for (int i = 0; i < f.grid_n(); ++i) {
                const double v = f.mu_at({i * dx, j * dy});
                CHECK(v == doctest::Approx(f.node(i, j)).epsilon(1e-12));
            }
        }
    }

    SUBCASE("outside queries clamp to the boundary") {
        CHECK(f.mu_at({-1.0, -1.0}) == doctest::Approx(f.node(0, 0)));
        CHECK(f.mu_at({1.0, 1.0}) ==
              doctest::Approx(f.node(f.grid_n() - 1, f.grid_n() - 1)));
    }
}

TEST_CASE("midpoint of a cell averages its four nodes") {
    // 2x2 grid: the whole tray is one cell; check the analytic midpoint value
    const Tray tray(0.2, 0.2);
    const FrictionField f = FrictionField::generate(0.3, 0.15, 2, 9, tray);
    const double expect = 0.25 * (f.node(0, 0) + f.node(1, 0) + f.node(0, 1) +
                                  f.node(1, 1));
    CHECK(f.mu_at({0.1, 0.1}) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("field values stay within [0.01, mu0 + amplitude]") {
    const Tray tray(0.2, 0.2);
    // amplitude exceeding mu0 forces the clamp on some nodes
    const FrictionField f = FrictionField::generate(0.05, 0.2, 8, 3, tray);
    CHECK(f.clamped());
    CounterRng rng(substream_key(3, Stream::kProbe, 12));
    for (int i = 0; i < 20000; ++i) {
        const double mu = f.mu_at({rng.uniform(0, 0.2), rng.uniform(0, 0.2)});
        CHECK(mu >= kMuFloor);
        CHECK(mu <= 0.05 + 0.2 + 1e-12);
    }
    double lowest = 1.0;
    for (double v : f.nodes()) lowest = std::min(lowest, v);
    CHECK(lowest == kMuFloor);  // clamp visibly active
}

TEST_CASE("empirical Lipschitz bound on random probe pairs") {
    const Tray tray(0.2, 0.2);
    const FrictionField f = FrictionField::generate(0.3, 0.1, 8, 42, tray);
    const double lip = 2.0 * f.amplitude() * f.grid_n() / 0.2;
    CounterRng rng(substream_key(4, Stream::kProbe, 13));
    for (int i = 0; i < 10000; ++i) {
        const Vec2 p{rng.uniform(0, 0.2), rng.uniform(0, 0.2)};
        const Vec2 q{rng.uniform(0, 0.2), rng.uniform(0, 0.2)};
        const double lhs = std::fabs(f.mu_at(p) - f.mu_at(q));
        CHECK(lhs <= lip * (p - q).norm() + 1e-12);
    }
}

TEST_CASE("different seeds give different fields") {
    const Tray tray(0.2, 0.2);
    const FrictionField ref = FrictionField::generate(0.3, 0.1, 8, 0, tray);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const FrictionField f = FrictionField::generate(0.3, 0.1, 8, seed, tray);
        bool same = true;
        for (std::size_t i = 0; i < f.nodes().size(); ++i) {
            if (f.nodes()[i] != ref.nodes()[i]) {
                same = false;
                break;
            }
        }
        CHECK_FALSE(same);
    }
}

TEST_CASE("field file round-trip is exact") {
    const Tray tray(0.2, 0.2);
    const FrictionField f = FrictionField::generate(0.3, 0.1, 8, 42, tray);
    const auto tmp = std::filesystem::temp_directory_path() / "tt_field.json";
    f.save(tmp);
    const FrictionField g = FrictionField::load(tmp);
    CHECK(g.mu0() == f.mu0());
    CHECK(g.amplitude() == f.amplitude());
    CHECK(g.grid_n() == f.grid_n());
    CHECK(g.seed() == f.seed());
    REQUIRE(g.nodes().size() == f.nodes().size());
    for (std::size_t i = 0; i < f.nodes().size(); ++i) {
        CHECK(g.nodes()[i] == f.nodes()[i]);  // bitwise via JSON round-trip
    }
    std::filesystem::remove(tmp);
}

TEST_CASE("noise level amplitudes are strictly increasing") {
    CHECK(noise_amplitude(NoiseLevel::kUniform) == 0.0);
    CHECK(noise_amplitude(NoiseLevel::kLow) < noise_amplitude(NoiseLevel::kMedium));
    CHECK(noise_amplitude(NoiseLevel::kMedium) < noise_amplitude(NoiseLevel::kHigh));
    CHECK(parse_noise_level("low") == NoiseLevel::kLow);
    CHECK_THROWS(parse_noise_level("extreme"));
}

TEST_CASE("generation rejects bad arguments") {
    const Tray tray(0.2, 0.2);
    CHECK_THROWS(FrictionField::generate(0.0, 0.1, 8, 1, tray));
    CHECK_THROWS(FrictionField::generate(0.3, -0.1, 8, 1, tray));
    CHECK_THROWS(FrictionField::generate(0.3, 0.1, 1, 1, tray));
}
