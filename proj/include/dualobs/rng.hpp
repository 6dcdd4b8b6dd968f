#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace dualobs {

// Seeded 64-bit generator. Doubles are built from the top 53 bits so that a
// given seed yields the same stream on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based stream splitting: independent child seeds from a root seed and
// up to two stream coordinates (e.g. operating point, trial index).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0);

// Inverse-CDF sampler over a finite PMF.
class DiscreteSampler {
public:
    DiscreteSampler() = default;
    explicit DiscreteSampler(std::span<const double> pmf);

    std::size_t operator()(Rng& rng) const;
    std::size_t size() const { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

}  // namespace dualobs
