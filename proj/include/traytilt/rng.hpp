#pragma once

#include <cstdint>

namespace traytilt {

/// splitmix64 finalizer: bijective avalanche mix of a 64-bit word.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// Named random substreams. Every consumer of randomness in the project
/// derives its generator key from (master seed, stream, index) so results
/// never depend on evaluation order or thread scheduling.
enum class Stream : std::uint64_t {
    kSequence = 1,   // tilt-direction draws of an action sequence
    kTrial = 2,      // per-trial initial pose sampling
    kFieldNode = 3,  // friction field node perturbations
    kShapeGen = 4,   // procedural shape presets
    kEntropyMc = 5,  // finite-sample entropy Monte Carlo
    kProbe = 6,      // test-only probe draws
};

constexpr std::uint64_t substream_key(std::uint64_t master, Stream stream,
                                      std::uint64_t index) noexcept {
    std::uint64_t h = mix64(master + kGoldenGamma * static_cast<std::uint64_t>(stream));
    return mix64(h + kGoldenGamma * index);
}

/// Counter-based generator (splitmix64). Output i is a pure function of
/// (key, i); two generators with the same key produce identical sequences.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) noexcept : state_(key) {}

    std::uint64_t next_u64() noexcept {
        state_ += kGoldenGamma;
        return mix64(state_);
    }

    /// Uniform double in [0, 1), 53 random mantissa bits.
    double next_double() noexcept { return (next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) noexcept {
        return lo + next_double() * (hi - lo);
    }

    /// Uniform integer in [0, n) via Lemire multiply-shift.
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace traytilt
