#pragma once

#include <cstdint>
#include <random>

namespace commlab {

/// The random stream of one script execution.
///
/// Built on mt19937_64 (fully specified by the standard) with hand-written
/// uniform and Gaussian transforms, so a given seed yields the same samples on
/// every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal sample (Marsaglia polar method).
    double gaussian();

    /// Seed from the operating system's entropy source.
    static std::uint64_t entropy_seed();

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    double spare_ = 0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive independent seeds from one base seed.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace commlab
