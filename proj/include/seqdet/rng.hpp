#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace seqdet {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based per-trial seeding: each trial owns an independent stream
/// derived from (base seed, trial index).
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) {
    return splitmix64(base ^ splitmix64(trial + 1));
}

/// mt19937_64 with explicit variate transforms. std:: distributions are
/// implementation-defined, so sampling goes through fixed formulas to keep
/// trajectories reproducible from (seed, trial) alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(splitmix64(seed)) {}

    /// Uniform on (0,1); never returns 0 or 1.
    double uniform() {
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Exponential with the given mean.
    double exponential(double mean) { return -mean * std::log(uniform()); }

    /// Standard normal via Box-Muller, spare value cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace seqdet
